//! Record conditioning and fixed-length windowing.
//!
//! The conditioning chain is z-score normalisation, a zero-phase
//! Butterworth bandpass, and a short centred moving average, applied to a
//! whole record. Windows are then cut from the conditioned record and
//! labelled from the sample-level annotations of the raw record.

pub mod butterworth;
mod segment;

pub use butterworth::Bandpass;
pub use segment::{label_window, segment, Segment, Segmentation, SegmentationConfig};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::EcgRecord;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    pub low_hz: f64,
    pub high_hz: f64,
    /// Butterworth prototype order.
    pub order: usize,
    pub ma_window_seconds: f64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            low_hz: 3.0,
            high_hz: 45.0,
            order: 10,
            ma_window_seconds: 0.05,
        }
    }
}

impl FilterConfig {
    /// Moving-average length in samples, rounded to the nearest odd count so
    /// the window stays centred.
    pub fn ma_window_len(&self, fs: f64) -> usize {
        2 * (self.ma_window_seconds * fs / 2.0).round() as usize + 1
    }
}

/// Z-score with population standard deviation.
pub fn normalize(record: &EcgRecord) -> Result<EcgRecord> {
    let out = normalize_samples(record.samples())?;
    record.map_samples(out)
}

pub fn normalize_samples(x: &[f64]) -> Result<Vec<f64>> {
    if x.len() < 2 {
        return Err(Error::DegenerateSignal(format!(
            "need at least 2 samples, got {}",
            x.len()
        )));
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let sd = var.sqrt();
    if !(sd > 0.0) {
        return Err(Error::DegenerateSignal("zero variance".into()));
    }
    Ok(x.iter().map(|v| (v - mean) / sd).collect())
}

pub fn bandpass_filter(record: &EcgRecord, cfg: &FilterConfig) -> Result<EcgRecord> {
    let filter = Bandpass::design(cfg.order, cfg.low_hz, cfg.high_hz, record.fs())?;
    record.map_samples(filter.filtfilt(record.samples()))
}

/// Centred moving mean; near the edges the window is truncated to the
/// samples that exist.
pub fn moving_average(x: &[f64], window_len: usize) -> Result<Vec<f64>> {
    if window_len == 0 {
        return Err(Error::InvalidParameter("moving-average window must be >= 1 sample".into()));
    }
    let n = x.len();
    let left = (window_len - 1) / 2;
    let right = window_len - 1 - left;
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for v in x {
        acc += v;
        prefix.push(acc);
    }
    Ok((0..n)
        .map(|i| {
            let lo = i.saturating_sub(left);
            let hi = (i + right + 1).min(n);
            (prefix[hi] - prefix[lo]) / (hi - lo) as f64
        })
        .collect())
}

/// Normalise, bandpass, then smooth.
pub fn condition(record: &EcgRecord, cfg: &FilterConfig) -> Result<EcgRecord> {
    let normed = normalize(record)?;
    let filtered = bandpass_filter(&normed, cfg)?;
    let smoothed = moving_average(filtered.samples(), cfg.ma_window_len(record.fs()))?;
    record.map_samples(smoothed)
}
