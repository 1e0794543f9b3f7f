//! Brute-force reference implementations shared by the integration tests.
//! They follow the textbook definitions directly and share no code with the
//! library.

#![allow(dead_code)]

use ecgsqa::io::Label;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_rr(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(300.0..2000.0)).collect()
}

/// Same as `random_rr` but clustered around a per-series mean so the
/// histogram has a proper peak.
pub fn clustered_rr(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let centre = rng.random_range(500.0..1500.0);
    let spread = rng.random_range(5.0..120.0);
    (0..len)
        .map(|_| {
            let u: f64 = (0..4).map(|_| rng.random_range(-1.0..1.0)).sum();
            (centre + spread * u).clamp(300.0, 1999.0)
        })
        .collect()
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    s
}

fn median(v: &[f64]) -> f64 {
    let s = sorted(v);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) / 2.0
    }
}

/// Linear interpolation between order statistics at rank `p * (n - 1)`.
fn quantile(v: &[f64], p: f64) -> f64 {
    let s = sorted(v);
    let h = p * (s.len() - 1) as f64;
    let below = h.floor();
    let i = below as usize;
    if i + 1 >= s.len() {
        return s[s.len() - 1];
    }
    s[i] * (1.0 - (h - below)) + s[i + 1] * (h - below)
}

fn sd(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// The 19 features, in table order.
pub fn hrv_oracle(nn: &[f64]) -> [f64; 19] {
    let n = nn.len();
    let d: Vec<f64> = (1..n).map(|i| nn[i] - nn[i - 1]).collect();
    let mean = nn.iter().sum::<f64>() / n as f64;
    let sdnn = sd(nn);
    let rmssd = (d.iter().map(|x| x * x).sum::<f64>() / d.len() as f64).sqrt();
    let sdsd = sd(&d);
    let med = median(nn);
    let dev: Vec<f64> = nn.iter().map(|x| (x - med).abs()).collect();
    let mad = 1.4826 * median(&dev);
    let pnn = |t: f64| 100.0 * d.iter().filter(|x| x.abs() > t).count() as f64 / d.len() as f64;
    let (lo, hi) = nn.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let (hti, tinn) = tinn_oracle(nn);
    [
        mean,
        sdnn,
        rmssd,
        sdsd,
        sdnn / mean,
        rmssd / mean,
        med,
        mad,
        mad / med,
        quantile(nn, 0.75) - quantile(nn, 0.25),
        if rmssd == 0.0 { 0.0 } else { sdnn / rmssd },
        quantile(nn, 0.2),
        quantile(nn, 0.8),
        pnn(50.0),
        pnn(20.0),
        lo,
        hi,
        hti,
        tinn,
    ]
}

pub const BIN_MS: f64 = 1000.0 / 128.0;

/// `(HTI, TINN)` by scanning every pair of base corners.
pub fn tinn_oracle(nn: &[f64]) -> (f64, f64) {
    let (_, n_edge, m_edge, hti) = tinn_scan(nn);
    (hti, (m_edge - n_edge) as f64 * BIN_MS)
}

/// Exhaustive triangle fit. Returns `(first_bin, n_edge, m_edge, hti)` with
/// absolute edge indices. Errors are compared as exact fractions; ties go
/// to the smallest `n_edge`, then the smallest `m_edge`.
pub fn tinn_scan(nn: &[f64]) -> (i64, i64, i64, f64) {
    let bins: Vec<i64> = nn.iter().map(|x| (x / BIN_MS).floor() as i64).collect();
    let first = *bins.iter().min().unwrap();
    let last = *bins.iter().max().unwrap();
    let width = (last - first + 1) as usize;
    let mut count = vec![0i128; width];
    for b in &bins {
        count[(b - first) as usize] += 1;
    }
    let height = *count.iter().max().unwrap();
    let mode = count.iter().position(|&c| c == height).unwrap();
    let hti = nn.len() as f64 / height as f64;
    if width == 1 {
        return (first, first, first, 1.0);
    }
    // everything in half-bin units: bin k has centre 2k+1, edge j sits at 2j.
    // Error for corners (n, m) = left(n) / lden^2 + right(m) / rden^2, where
    // left(n) covers the bins below the apex (zero left of n) and right(m)
    // those above it.
    let apex = 2 * mode as i128 + 1;
    let left: Vec<(i128, i128)> = (0..=mode)
        .map(|n| {
            let den = apex - 2 * n as i128;
            let num: i128 = count[..=mode]
                .iter()
                .enumerate()
                .map(|(k, &c)| {
                    let x = 2 * k as i128 + 1;
                    let r = if x < 2 * n as i128 { c * den } else { c * den - height * (x - 2 * n as i128) };
                    r * r
                })
                .sum();
            (num, den * den)
        })
        .collect();
    let right: Vec<(i128, i128)> = (mode + 1..=width)
        .map(|m| {
            let den = 2 * m as i128 - apex;
            let num: i128 = count[mode + 1..]
                .iter()
                .enumerate()
                .map(|(j, &c)| {
                    let x = 2 * (mode + 1 + j) as i128 + 1;
                    let r = if x > 2 * m as i128 { c * den } else { c * den - height * (2 * m as i128 - x) };
                    r * r
                })
                .sum();
            (num, den * den)
        })
        .collect();
    let mut best: Option<(i128, i128, usize, usize)> = None; // (num, den, n, m)
    for (n, &(ln, ld)) in left.iter().enumerate() {
        for (j, &(rn, rd)) in right.iter().enumerate() {
            let (num, den) = (ln * rd + rn * ld, ld * rd);
            if best.is_none_or(|(bn, bd, _, _)| num * bd < bn * den) {
                best = Some((num, den, n, mode + 1 + j));
            }
        }
    }
    let (_, _, n, m) = best.unwrap();
    (first, first + n as i64, first + m as i64, hti)
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}

pub struct BruteMetrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub ap: Option<f64>,
}

/// Weighted metrics by counting each cell separately, AP by sweeping every
/// distinct score as a threshold.
pub fn brute_metrics(y: &[Label], pred: &[Label], score: &[f64]) -> BruteMetrics {
    let n = y.len();
    let correct = (0..n).filter(|&i| y[i] == pred[i]).count();
    let mut precision = 0.0;
    let mut recall = 0.0;
    let mut f1 = 0.0;
    for c in [Label::Clean, Label::Noisy] {
        let support = y.iter().filter(|&&t| t == c).count();
        let predicted = pred.iter().filter(|&&p| p == c).count();
        let hit = (0..n).filter(|&i| y[i] == c && pred[i] == c).count();
        let p = if predicted == 0 { 0.0 } else { hit as f64 / predicted as f64 };
        let r = if support == 0 { 0.0 } else { hit as f64 / support as f64 };
        let f = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
        let w = support as f64 / n as f64;
        precision += w * p;
        recall += w * r;
        f1 += w * f;
    }
    let positives = y.iter().filter(|&&t| t == Label::Noisy).count();
    let ap = (positives > 0).then(|| {
        let mut thresholds: Vec<f64> = score.to_vec();
        thresholds.sort_by(|a, b| b.partial_cmp(a).unwrap());
        thresholds.dedup();
        let mut prev_recall = 0.0;
        let mut ap = 0.0;
        for t in thresholds {
            let tp = (0..n).filter(|&i| score[i] >= t && y[i] == Label::Noisy).count();
            let called = (0..n).filter(|&i| score[i] >= t).count();
            let r = tp as f64 / positives as f64;
            ap += (r - prev_recall) * tp as f64 / called as f64;
            prev_recall = r;
        }
        ap
    });
    BruteMetrics {
        accuracy: correct as f64 / n as f64,
        precision,
        recall,
        f1,
        ap,
    }
}

/// Best Gini split of one node by trying every midpoint of every feature.
/// Returns `(weighted child impurity, feature, threshold)`; ties go to the
/// lowest feature, then the lowest threshold.
pub fn gini_scan(x: &[Vec<f64>], y: &[Label]) -> Option<(f64, usize, f64)> {
    let gini = |rows: &[usize]| {
        if rows.is_empty() {
            return 0.0;
        }
        let p = rows.iter().filter(|&&i| y[i] == Label::Noisy).count() as f64 / rows.len() as f64;
        1.0 - p * p - (1.0 - p) * (1.0 - p)
    };
    let n = x.len();
    let mut best: Option<(f64, usize, f64)> = None;
    for f in 0..x[0].len() {
        let mut vals: Vec<f64> = x.iter().map(|r| r[f]).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals.dedup();
        for w in vals.windows(2) {
            let t = (w[0] + w[1]) / 2.0;
            let (l, r): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| x[i][f] <= t);
            let imp = (l.len() as f64 * gini(&l) + r.len() as f64 * gini(&r)) / n as f64;
            if best.is_none_or(|(b, _, _)| imp < b - 1e-12) {
                best = Some((imp, f, t));
            }
        }
    }
    best
}

/// Unit sinusoid of `secs` seconds.
pub fn sine(freq: f64, fs: f64, secs: f64) -> Vec<f64> {
    let n = (fs * secs).round() as usize;
    (0..n).map(|i| (2.0 * std::f64::consts::PI * freq * i as f64 / fs).sin()).collect()
}

pub fn rms(x: &[f64]) -> f64 {
    (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
}
