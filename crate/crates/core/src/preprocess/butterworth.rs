//! Digital Butterworth bandpass design and zero-phase filtering.
//!
//! Design follows the classic route: analog low-pass prototype, lowpass to
//! bandpass transform on prewarped edges, bilinear transform, then pairing
//! of poles into second-order sections. Each section carries the zeros
//! `{+1, -1}` and is scaled to unit gain at the digital centre frequency, so
//! the cascade has unit gain there as well.

use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
struct Complex {
    re: f64,
    im: f64,
}

impl Complex {
    fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.im + o.im)
    }
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.im - o.im)
    }
    fn mul(self, o: Self) -> Self {
        Self::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
    fn scale(self, k: f64) -> Self {
        Self::new(self.re * k, self.im * k)
    }
    fn div(self, o: Self) -> Self {
        let d = o.re * o.re + o.im * o.im;
        Self::new(
            (self.re * o.re + self.im * o.im) / d,
            (self.im * o.re - self.re * o.im) / d,
        )
    }
    fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }
    fn sqrt(self) -> Self {
        let r = self.abs();
        let re = ((r + self.re) / 2.0).max(0.0).sqrt();
        let im = ((r - self.re) / 2.0).max(0.0).sqrt();
        Self::new(re, if self.im < 0.0 { -im } else { im })
    }
    fn expi(theta: f64) -> Self {
        Self::new(theta.cos(), theta.sin())
    }
}

/// One biquad, `b0 + b1 z^-1 + b2 z^-2` over `1 + a1 z^-1 + a2 z^-2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 2],
}

impl Biquad {
    fn response(&self, w: f64) -> Complex {
        let z1 = Complex::expi(-w);
        let z2 = Complex::expi(-2.0 * w);
        let num = Complex::new(self.b[0], 0.0)
            .add(z1.scale(self.b[1]))
            .add(z2.scale(self.b[2]));
        let den = Complex::new(1.0, 0.0)
            .add(z1.scale(self.a[0]))
            .add(z2.scale(self.a[1]));
        num.div(den)
    }

    /// Direct form II transposed state after an infinitely long unit input.
    fn step_state(&self) -> [f64; 2] {
        let [b0, b1, b2] = self.b;
        let [a1, a2] = self.a;
        let g = (b0 + b1 + b2) / (1.0 + a1 + a2);
        let z2 = b2 - a2 * g;
        let z1 = b1 - a1 * g + z2;
        [z1, z2]
    }

    fn dc_gain(&self) -> f64 {
        (self.b[0] + self.b[1] + self.b[2]) / (1.0 + self.a[0] + self.a[1])
    }
}

/// Cascade of second-order sections designed as a Butterworth bandpass.
#[derive(Debug, Clone, PartialEq)]
pub struct Bandpass {
    sections: Vec<Biquad>,
    order: usize,
    low_hz: f64,
    high_hz: f64,
    fs: f64,
}

impl Bandpass {
    /// `order` is the prototype order; the realised filter has `2 * order` poles.
    pub fn design(order: usize, low_hz: f64, high_hz: f64, fs: f64) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidParameter("filter order must be >= 1".into()));
        }
        if !(fs > 0.0) {
            return Err(Error::InvalidSamplingRate(fs));
        }
        if !(0.0 < low_hz && low_hz < high_hz && high_hz < fs / 2.0) {
            return Err(Error::InvalidParameter(format!(
                "fs too low for passband: need 0 < {low_hz} < {high_hz} < fs/2 = {}",
                fs / 2.0
            )));
        }

        let warp = |f: f64| 2.0 * fs * (PI * f / fs).tan();
        let wl = warp(low_hz);
        let wh = warp(high_hz);
        let bw = wh - wl;
        let w0sq = wl * wh;

        // prototype poles on the left half of the unit circle
        let n = order as f64;
        let mut analog = Vec::with_capacity(2 * order);
        for k in 0..order {
            let p = Complex::expi(PI * (2.0 * k as f64 + n + 1.0) / (2.0 * n));
            let half = p.scale(bw / 2.0);
            let root = half.mul(half).sub(Complex::new(w0sq, 0.0)).sqrt();
            analog.push(half.add(root));
            analog.push(half.sub(root));
        }

        let fs2 = Complex::new(2.0 * fs, 0.0);
        let digital: Vec<Complex> = analog
            .iter()
            .map(|&s| fs2.add(s).div(fs2.sub(s)))
            .collect();

        let centre = 2.0 * (w0sq.sqrt() / (2.0 * fs)).atan();
        let sections = pair_poles(&digital)
            .into_iter()
            .map(|(p1, p2)| {
                let sum = p1.add(p2);
                let prod = p1.mul(p2);
                let mut s = Biquad {
                    b: [1.0, 0.0, -1.0],
                    a: [-sum.re, prod.re],
                };
                let g = s.response(centre).abs();
                for b in &mut s.b {
                    *b /= g;
                }
                s
            })
            .collect();

        Ok(Self {
            sections,
            order,
            low_hz,
            high_hz,
            fs,
        })
    }

    pub fn sections(&self) -> &[Biquad] {
        &self.sections
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn band(&self) -> (f64, f64) {
        (self.low_hz, self.high_hz)
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    /// Magnitude of one forward pass at `freq_hz`, from the realised sections.
    pub fn magnitude(&self, freq_hz: f64) -> f64 {
        let w = 2.0 * PI * freq_hz / self.fs;
        self.sections.iter().map(|s| s.response(w).abs()).product()
    }

    /// Closed-form Butterworth bandpass magnitude of one forward pass,
    /// `1 / sqrt(1 + ((w^2 - w0^2) / (w * bw))^(2n))` on prewarped frequencies.
    pub fn analytic_magnitude(&self, freq_hz: f64) -> f64 {
        let warp = |f: f64| 2.0 * self.fs * (PI * f / self.fs).tan();
        let (wl, wh, w) = (warp(self.low_hz), warp(self.high_hz), warp(freq_hz));
        if w == 0.0 {
            return 0.0;
        }
        let omega = (w * w - wl * wh) / (w * (wh - wl));
        1.0 / (1.0 + omega.abs().powf(2.0 * self.order as f64)).sqrt()
    }

    /// Reflection padding length used by [`Bandpass::filtfilt`]: three times
    /// the realised filter order.
    pub fn pad_len(&self) -> usize {
        3 * 2 * self.order
    }

    /// Single causal pass with zero initial state.
    pub fn filter(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        for s in &self.sections {
            run_section(s, &mut y, [0.0, 0.0]);
        }
        y
    }

    /// Zero-phase forward-backward filtering.
    ///
    /// The input is extended at both ends by an odd reflection of `pad_len`
    /// samples (capped at `len - 1`), each pass starts from the steady state
    /// for its first sample, and the padding is trimmed afterwards.
    pub fn filtfilt(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        if n == 0 {
            return Vec::new();
        }
        let pad = self.pad_len().min(n - 1);
        let mut ext = Vec::with_capacity(n + 2 * pad);
        ext.extend((1..=pad).rev().map(|i| 2.0 * x[0] - x[i]));
        ext.extend_from_slice(x);
        ext.extend((1..=pad).map(|i| 2.0 * x[n - 1] - x[n - 1 - i]));

        self.pass_with_steady_start(&mut ext);
        ext.reverse();
        self.pass_with_steady_start(&mut ext);
        ext.reverse();
        ext[pad..pad + n].to_vec()
    }

    fn pass_with_steady_start(&self, y: &mut [f64]) {
        let mut level = y[0];
        for s in &self.sections {
            let [z1, z2] = s.step_state();
            run_section(s, y, [z1 * level, z2 * level]);
            level *= s.dc_gain();
        }
    }
}

fn run_section(s: &Biquad, y: &mut [f64], mut z: [f64; 2]) {
    let [b0, b1, b2] = s.b;
    let [a1, a2] = s.a;
    for v in y.iter_mut() {
        let x = *v;
        let out = b0 * x + z[0];
        z[0] = b1 * x - a1 * out + z[1];
        z[1] = b2 * x - a2 * out;
        *v = out;
    }
}

/// Groups poles into conjugate pairs, and leftover real poles two by two.
fn pair_poles(poles: &[Complex]) -> Vec<(Complex, Complex)> {
    let tol = 1e-12;
    let mut upper: Vec<Complex> = poles.iter().copied().filter(|p| p.im > tol).collect();
    let mut real: Vec<Complex> = poles
        .iter()
        .copied()
        .filter(|p| p.im.abs() <= tol)
        .map(|p| Complex::new(p.re, 0.0))
        .collect();
    // poles nearest the unit circle last, keeping the sharpest sections at the end
    upper.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    real.sort_by(|a, b| a.re.total_cmp(&b.re));
    let mut out: Vec<(Complex, Complex)> = real
        .chunks(2)
        .map(|c| (c[0], *c.get(1).unwrap_or(&Complex::new(0.0, 0.0))))
        .collect();
    out.extend(upper.into_iter().map(|p| (p, Complex::new(p.re, -p.im))));
    out
}
