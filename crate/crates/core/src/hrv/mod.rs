//! RR-interval derivation and time-domain HRV features.
//!
//! Nineteen features are computed per window, in a fixed order that is part
//! of the public file contract (feature tables and model artifacts):
//!
//! | name | definition |
//! |------|------------|
//! | MeanNN | mean interval |
//! | SDNN | sample standard deviation (n - 1) |
//! | RMSSD | root mean square of successive differences |
//! | SDSD | sample standard deviation of successive differences |
//! | CVNN | SDNN / MeanNN |
//! | CVSD | RMSSD / MeanNN |
//! | MedianNN | median |
//! | MadNN | 1.4826 * median absolute deviation |
//! | MCVNN | MadNN / MedianNN |
//! | IQRNN | 75th - 25th percentile |
//! | SDRMSSD | SDNN / RMSSD, 0 when RMSSD is 0 |
//! | Prc20NN, Prc80NN | 20th and 80th percentiles |
//! | pNN50, pNN20 | % of successive differences exceeding 50 / 20 ms |
//! | MinNN, MaxNN | extremes |
//! | HTI | triangular index, N / modal bin count |
//! | TINN | base width of the best-fit histogram triangle |
//!
//! Percentiles interpolate linearly between closest ranks. All durations
//! are in milliseconds.

mod tinn;

pub use tinn::{histogram, tinn, NnHistogram, Tinn, HIST_BIN_MS};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rpeak::PeakList;

pub const N_FEATURES: usize = 19;

/// Fewer intervals than this marks a window undetectable.
pub const MIN_INTERVALS: usize = 4;

pub const FEATURE_NAMES: [&str; N_FEATURES] = [
    "MeanNN", "SDNN", "RMSSD", "SDSD", "CVNN", "CVSD", "MedianNN", "MadNN", "MCVNN", "IQRNN",
    "SDRMSSD", "Prc20NN", "Prc80NN", "pNN50", "pNN20", "MinNN", "MaxNN", "HTI", "TINN",
];

const MAD_SCALE: f64 = 1.4826;

/// Successive R-peak gaps in milliseconds.
#[derive(Debug, Clone, PartialEq)]
pub struct RrSeries {
    intervals_ms: Vec<f64>,
}

impl RrSeries {
    pub fn new(intervals_ms: Vec<f64>) -> Result<Self> {
        if let Some(x) = intervals_ms.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "RR interval must be positive and finite, got {x}"
            )));
        }
        Ok(Self { intervals_ms })
    }

    pub fn intervals_ms(&self) -> &[f64] {
        &self.intervals_ms
    }

    pub fn len(&self) -> usize {
        self.intervals_ms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals_ms.is_empty()
    }
}

pub fn rr_intervals(peaks: &PeakList) -> Result<RrSeries> {
    let idx = peaks.indices();
    if idx.len() < 2 {
        return Err(Error::InsufficientPeaks(idx.len()));
    }
    let fs = peaks.fs();
    let intervals = idx
        .windows(2)
        .map(|w| (w[1] - w[0]) as f64 / fs * 1000.0)
        .collect();
    RrSeries::new(intervals)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub mean_nn: f64,
    pub sdnn: f64,
    pub rmssd: f64,
    pub sdsd: f64,
    pub cvnn: f64,
    pub cvsd: f64,
    pub median_nn: f64,
    pub mad_nn: f64,
    pub mcvnn: f64,
    pub iqr_nn: f64,
    pub sdrmssd: f64,
    pub prc20_nn: f64,
    pub prc80_nn: f64,
    pub pnn50: f64,
    pub pnn20: f64,
    pub min_nn: f64,
    pub max_nn: f64,
    pub hti: f64,
    pub tinn: f64,
}

impl FeatureVector {
    /// Values in [`FEATURE_NAMES`] order.
    pub fn to_array(&self) -> [f64; N_FEATURES] {
        [
            self.mean_nn,
            self.sdnn,
            self.rmssd,
            self.sdsd,
            self.cvnn,
            self.cvsd,
            self.median_nn,
            self.mad_nn,
            self.mcvnn,
            self.iqr_nn,
            self.sdrmssd,
            self.prc20_nn,
            self.prc80_nn,
            self.pnn50,
            self.pnn20,
            self.min_nn,
            self.max_nn,
            self.hti,
            self.tinn,
        ]
    }

    pub fn from_array(a: [f64; N_FEATURES]) -> Self {
        Self {
            mean_nn: a[0],
            sdnn: a[1],
            rmssd: a[2],
            sdsd: a[3],
            cvnn: a[4],
            cvsd: a[5],
            median_nn: a[6],
            mad_nn: a[7],
            mcvnn: a[8],
            iqr_nn: a[9],
            sdrmssd: a[10],
            prc20_nn: a[11],
            prc80_nn: a[12],
            pnn50: a[13],
            pnn20: a[14],
            min_nn: a[15],
            max_nn: a[16],
            hti: a[17],
            tinn: a[18],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample standard deviation (n - 1 denominator); 0 for a single value.
fn sample_std(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    let ss: f64 = v.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / (v.len() - 1) as f64).sqrt()
}

/// Linear interpolation between closest ranks; `sorted` must be ascending.
pub(crate) fn percentile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = p / 100.0 * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

fn ratio_or_zero(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

pub fn compute_features(rr: &RrSeries) -> Result<FeatureVector> {
    let nn = rr.intervals_ms();
    if nn.len() < MIN_INTERVALS {
        return Err(Error::Undetectable {
            needed: MIN_INTERVALS,
            got: nn.len(),
        });
    }

    let diffs: Vec<f64> = nn.windows(2).map(|w| w[1] - w[0]).collect();
    let mut sorted = nn.to_vec();
    sorted.sort_by(f64::total_cmp);

    let mean_nn = mean(nn);
    let sdnn = sample_std(nn);
    let rmssd = (diffs.iter().map(|d| d * d).sum::<f64>() / diffs.len() as f64).sqrt();
    let sdsd = sample_std(&diffs);
    let median_nn = percentile_sorted(&sorted, 50.0);

    let mut abs_dev: Vec<f64> = nn.iter().map(|x| (x - median_nn).abs()).collect();
    abs_dev.sort_by(f64::total_cmp);
    let mad_nn = MAD_SCALE * percentile_sorted(&abs_dev, 50.0);

    let exceed = |ms: f64| {
        100.0 * diffs.iter().filter(|d| d.abs() > ms).count() as f64 / diffs.len() as f64
    };

    let tri = tinn(rr)?;

    Ok(FeatureVector {
        mean_nn,
        sdnn,
        rmssd,
        sdsd,
        cvnn: sdnn / mean_nn,
        cvsd: rmssd / mean_nn,
        median_nn,
        mad_nn,
        mcvnn: mad_nn / median_nn,
        iqr_nn: percentile_sorted(&sorted, 75.0) - percentile_sorted(&sorted, 25.0),
        sdrmssd: ratio_or_zero(sdnn, rmssd),
        prc20_nn: percentile_sorted(&sorted, 20.0),
        prc80_nn: percentile_sorted(&sorted, 80.0),
        pnn50: exceed(50.0),
        pnn20: exceed(20.0),
        min_nn: sorted[0],
        max_nn: sorted[sorted.len() - 1],
        hti: tri.hti,
        tinn: tri.tinn_ms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rr(v: &[f64]) -> RrSeries {
        RrSeries::new(v.to_vec()).unwrap()
    }

    #[test]
    fn rr_from_peaks() {
        let p = PeakList::new(vec![0, 360, 720], 360.0).unwrap();
        assert_eq!(rr_intervals(&p).unwrap().intervals_ms(), &[1000.0, 1000.0]);
        let p = PeakList::new(vec![0, 180], 360.0).unwrap();
        assert_eq!(rr_intervals(&p).unwrap().intervals_ms(), &[500.0]);
        let p = PeakList::new(vec![5], 360.0).unwrap();
        assert!(matches!(rr_intervals(&p), Err(Error::InsufficientPeaks(1))));
    }

    #[test]
    fn constant_rr() {
        let f = compute_features(&rr(&[800.0; 10])).unwrap();
        assert_eq!(f.mean_nn, 800.0);
        assert_eq!(f.sdnn, 0.0);
        assert_eq!(f.rmssd, 0.0);
        assert_eq!(f.pnn50, 0.0);
        assert_eq!(f.min_nn, 800.0);
        assert_eq!(f.max_nn, 800.0);
        assert_eq!(f.iqr_nn, 0.0);
        assert_eq!(f.mad_nn, 0.0);
        assert_eq!(f.cvsd, 0.0);
        assert_eq!(f.sdrmssd, 0.0);
        assert_eq!(f.tinn, 0.0);
        assert_eq!(f.hti, 1.0);
        assert!(f.is_finite());
    }

    #[test]
    fn hand_arithmetic() {
        let f = compute_features(&rr(&[800.0, 810.0, 800.0, 810.0])).unwrap();
        assert!((f.rmssd - 10.0).abs() < 1e-12);
        assert_eq!(f.pnn20, 0.0);
        assert_eq!(f.mean_nn, 805.0);
        assert_eq!(f.median_nn, 805.0);
    }

    #[test]
    fn three_interval_example_is_undetectable_but_formulas_hold() {
        // the worked example [800, 810, 800] sits below the 4-interval minimum
        let short = rr(&[800.0, 810.0, 800.0]);
        assert!(matches!(compute_features(&short), Err(Error::Undetectable { got: 3, .. })));
        let nn = short.intervals_ms();
        let d: Vec<f64> = nn.windows(2).map(|w| w[1] - w[0]).collect();
        let rmssd = (d.iter().map(|x| x * x).sum::<f64>() / d.len() as f64).sqrt();
        assert!((rmssd - 10.0).abs() < 1e-12);
        assert!((mean(nn) - 803.333_333_333_333_3).abs() < 1e-9);
    }

    #[test]
    fn percentile_interpolates() {
        let s = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(percentile_sorted(&s, 50.0), 2.5);
        assert!((percentile_sorted(&s, 20.0) - 1.6).abs() < 1e-12);
        assert_eq!(percentile_sorted(&s, 100.0), 4.0);
        assert_eq!(percentile_sorted(&s, 0.0), 1.0);
    }

    #[test]
    fn rejects_non_positive_intervals() {
        assert!(RrSeries::new(vec![800.0, 0.0]).is_err());
        assert!(RrSeries::new(vec![800.0, f64::NAN]).is_err());
    }

    #[test]
    fn array_round_trip() {
        let a: [f64; N_FEATURES] = std::array::from_fn(|i| i as f64 * 1.5);
        assert_eq!(FeatureVector::from_array(a).to_array(), a);
    }
}
