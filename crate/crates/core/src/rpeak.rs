//! R-peak detection with Hamilton-Tompkins decision rules, followed by a
//! local-maximum correction pass.
//!
//! The detection signal is the 8-16 Hz band, differentiated, rectified and
//! smoothed over 80 ms. Candidate peaks are the local maxima of that signal
//! that dominate their 200 ms neighbourhood; they are then classified in
//! time order against an adaptive threshold built from running means of
//! recent QRS and noise peak heights.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hrv::percentile_sorted;
use crate::preprocess::{moving_average, Bandpass};

/// Strictly increasing R-peak sample indices.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakList {
    indices: Vec<usize>,
    fs: f64,
}

impl PeakList {
    pub fn new(indices: Vec<usize>, fs: f64) -> Result<Self> {
        if !(fs > 0.0) {
            return Err(Error::InvalidSamplingRate(fs));
        }
        if indices.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("peak indices must be strictly increasing".into()));
        }
        Ok(Self { indices, fs })
    }

    pub fn empty(fs: f64) -> Self {
        Self {
            indices: Vec::new(),
            fs,
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// One index per line.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.indices.len() * 8);
        for i in &self.indices {
            s.push_str(&i.to_string());
            s.push('\n');
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorConfig {
    pub band_low_hz: f64,
    pub band_high_hz: f64,
    pub band_order: usize,
    pub smoothing_window_s: f64,
    pub threshold_coefficient: f64,
    pub refractory_s: f64,
    pub twave_window_s: f64,
    pub searchback_factor: f64,
    pub buffer_len: usize,
    pub correction_tolerance_s: f64,
    /// Span used to seed the peak buffers.
    pub init_s: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            band_low_hz: 8.0,
            band_high_hz: 16.0,
            band_order: 2,
            smoothing_window_s: 0.08,
            threshold_coefficient: 0.3125,
            refractory_s: 0.2,
            twave_window_s: 0.36,
            searchback_factor: 1.5,
            buffer_len: 8,
            correction_tolerance_s: 0.05,
            init_s: 2.0,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        let durations = [
            self.smoothing_window_s,
            self.refractory_s,
            self.twave_window_s,
            self.correction_tolerance_s,
            self.init_s,
        ];
        if durations.iter().any(|d| !(*d > 0.0)) {
            return Err(Error::InvalidParameter("detector durations must be positive".into()));
        }
        if !(self.threshold_coefficient > 0.0 && self.threshold_coefficient < 1.0) {
            return Err(Error::InvalidParameter("threshold_coefficient must be in (0, 1)".into()));
        }
        if self.buffer_len == 0 || !(self.searchback_factor > 0.0) {
            return Err(Error::InvalidParameter("buffer_len and searchback_factor must be positive".into()));
        }
        Ok(())
    }
}

const MIN_FS: f64 = 100.0;
const MIN_SECONDS: f64 = 2.0;

struct Running {
    buf: VecDeque<f64>,
    cap: usize,
}

impl Running {
    fn seeded(value: f64, cap: usize) -> Self {
        Self {
            buf: std::iter::repeat_n(value, cap).collect(),
            cap,
        }
    }

    fn empty(cap: usize) -> Self {
        Self {
            buf: VecDeque::with_capacity(cap),
            cap,
        }
    }

    fn push(&mut self, v: f64) {
        if self.buf.len() == self.cap {
            self.buf.pop_front();
        }
        self.buf.push_back(v);
    }

    fn mean(&self) -> Option<f64> {
        if self.buf.is_empty() {
            None
        } else {
            Some(self.buf.iter().sum::<f64>() / self.buf.len() as f64)
        }
    }
}

/// Band-limited first difference and the smoothed rectified detection signal.
fn detection_signals(samples: &[f64], fs: f64, cfg: &DetectorConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    let band = Bandpass::design(cfg.band_order, cfg.band_low_hz, cfg.band_high_hz, fs)?;
    let filtered = band.filtfilt(samples);
    let mut diff = Vec::with_capacity(filtered.len());
    diff.push(0.0);
    diff.extend(filtered.windows(2).map(|w| w[1] - w[0]));
    let rectified: Vec<f64> = diff.iter().map(|d| d.abs()).collect();
    let win = 2 * (cfg.smoothing_window_s * fs / 2.0).round() as usize + 1;
    let smoothed = moving_average(&rectified, win)?;
    Ok((rectified, smoothed))
}

/// Local maxima of `sig` that are not exceeded within `radius` samples on
/// either side. Equal heights go to the earlier peak.
fn dominant_peaks(sig: &[f64], radius: usize) -> Vec<usize> {
    let n = sig.len();
    let maxima: Vec<usize> = (1..n.saturating_sub(1))
        .filter(|&i| sig[i] > sig[i - 1] && sig[i] >= sig[i + 1])
        .collect();
    let mut keep = Vec::with_capacity(maxima.len());
    for (k, &i) in maxima.iter().enumerate() {
        let beaten_before = maxima[..k]
            .iter()
            .rev()
            .take_while(|&&j| i - j <= radius)
            .any(|&j| sig[j] >= sig[i]);
        let beaten_after = maxima[k + 1..]
            .iter()
            .take_while(|&&j| j - i <= radius)
            .any(|&j| sig[j] > sig[i]);
        if !beaten_before && !beaten_after {
            keep.push(i);
        }
    }
    keep
}

pub fn detect_rpeaks(samples: &[f64], fs: f64, cfg: &DetectorConfig) -> Result<PeakList> {
    cfg.validate()?;
    if fs < MIN_FS {
        return Err(Error::InvalidParameter(format!(
            "fs too low for detection: {fs} Hz < {MIN_FS} Hz"
        )));
    }
    if (samples.len() as f64) < MIN_SECONDS * fs {
        return Err(Error::SignalTooShort(format!(
            "{} samples is under {MIN_SECONDS} s at {fs} Hz",
            samples.len()
        )));
    }

    let (slope, det) = detection_signals(samples, fs, cfg)?;
    let secs = |s: f64| (s * fs).round() as usize;
    let refractory = secs(cfg.refractory_s);
    let twave = secs(cfg.twave_window_s);
    let slope_radius = secs(cfg.smoothing_window_s / 2.0);

    let init_end = secs(cfg.init_s).min(det.len());
    let mut init: Vec<f64> = det[..init_end].to_vec();
    init.sort_by(f64::total_cmp);
    let init_max = *init.last().unwrap_or(&0.0);
    if !(init_max > 0.0) {
        return Ok(PeakList::empty(fs));
    }
    let mut qrs = Running::seeded(init_max, cfg.buffer_len);
    let mut noise = Running::seeded(percentile_sorted(&init, 10.0), cfg.buffer_len);
    let mut rr = Running::empty(cfg.buffer_len);

    let max_slope = |i: usize| {
        let lo = i.saturating_sub(slope_radius);
        let hi = (i + slope_radius + 1).min(slope.len());
        slope[lo..hi].iter().fold(0.0f64, |a, &b| a.max(b))
    };
    let threshold = |qrs: &Running, noise: &Running| {
        let n = noise.mean().unwrap_or(0.0);
        let q = qrs.mean().unwrap_or(0.0);
        n + cfg.threshold_coefficient * (q - n)
    };

    let mut accepted: Vec<usize> = Vec::new();
    let mut last_slope = 0.0;
    // sub-threshold candidates since the last accepted beat
    let mut pending: Vec<usize> = Vec::new();

    let candidates = dominant_peaks(&det, refractory);
    let accept = |i: usize,
                      accepted: &mut Vec<usize>,
                      qrs: &mut Running,
                      rr: &mut Running,
                      last_slope: &mut f64| {
        if let Some(&prev) = accepted.last() {
            rr.push((i - prev) as f64);
        }
        qrs.push(det[i]);
        *last_slope = max_slope(i);
        accepted.push(i);
    };

    for &i in candidates.iter().chain(std::iter::once(&det.len())) {
        // searchback: look for a missed beat when the gap runs long
        while let (Some(&last), Some(mean_rr)) = (accepted.last(), rr.mean()) {
            if ((i - last) as f64) <= cfg.searchback_factor * mean_rr {
                break;
            }
            let half = threshold(&qrs, &noise) / 2.0;
            let best = pending
                .iter()
                .copied()
                .filter(|&p| p - last >= twave && det[p] > half)
                .fold(None, |best: Option<usize>, p| match best {
                    Some(b) if det[b] >= det[p] => Some(b),
                    _ => Some(p),
                });
            match best {
                Some(p) => {
                    accept(p, &mut accepted, &mut qrs, &mut rr, &mut last_slope);
                    pending.retain(|&q| q > p);
                }
                None => break,
            }
        }
        if i == det.len() {
            break;
        }

        if let Some(&last) = accepted.last() {
            if i - last < refractory {
                continue;
            }
        }
        let h = det[i];
        if h > threshold(&qrs, &noise) {
            let is_twave = match accepted.last() {
                Some(&last) => i - last < twave && max_slope(i) < 0.5 * last_slope,
                None => false,
            };
            if is_twave {
                noise.push(h);
            } else {
                accept(i, &mut accepted, &mut qrs, &mut rr, &mut last_slope);
                pending.clear();
            }
        } else {
            noise.push(h);
            pending.push(i);
        }
    }

    PeakList::new(accepted, fs)
}

/// Moves each peak to the largest sample within `tolerance_s` of it,
/// repeating until the peak is the earliest maximum of its own
/// neighbourhood, then merges duplicates.
pub fn correct_rpeaks(samples: &[f64], peaks: &PeakList, tolerance_s: f64) -> PeakList {
    let radius = (tolerance_s * peaks.fs()).round() as usize;
    let n = samples.len();
    let mut out: Vec<usize> = peaks
        .indices()
        .iter()
        .filter(|&&p| p < n)
        .map(|&start| {
            let mut p = start;
            loop {
                let lo = p.saturating_sub(radius);
                let hi = (p + radius + 1).min(n);
                let mut best = lo;
                for j in lo..hi {
                    if samples[j] > samples[best] {
                        best = j;
                    }
                }
                if best == p {
                    break p;
                }
                p = best;
            }
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    PeakList {
        indices: out,
        fs: peaks.fs(),
    }
}

/// Detection followed by correction on the same signal.
pub fn segment_rpeaks(samples: &[f64], fs: f64, cfg: &DetectorConfig) -> Result<PeakList> {
    let raw = detect_rpeaks(samples, fs, cfg)?;
    Ok(correct_rpeaks(samples, &raw, cfg.correction_tolerance_s))
}
