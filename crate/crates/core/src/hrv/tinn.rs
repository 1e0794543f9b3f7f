//! NN-interval histogram, triangular index and TINN.
//!
//! The histogram uses bins of 1/128 s aligned at 0, so bin `k` covers
//! `[k * w, (k + 1) * w)`. The triangle peaks at the centre of the modal bin
//! with the modal count as height; its base corners `N` and `M` are bin edges
//! within the occupied range. Squared error is evaluated at bin centres.
//!
//! Candidate errors are compared exactly: all positions are integers in
//! half-bin units, so each error is a rational with an integer numerator.
//! The left corner only affects bins left of the mode and the right corner
//! only bins to its right, so the two are minimised independently. Ties go to
//! the lowest edge index.

use crate::error::Result;

use super::{RrSeries, MIN_INTERVALS};
use crate::error::Error;

pub const HIST_BIN_MS: f64 = 1000.0 / 128.0;

/// Bin counts over the occupied range `first_bin ..= first_bin + counts.len() - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NnHistogram {
    pub first_bin: i64,
    pub counts: Vec<u64>,
}

impl NnHistogram {
    /// Index (into `counts`) of the first bin holding the maximum count.
    pub fn mode(&self) -> usize {
        let max = *self.counts.iter().max().unwrap_or(&0);
        self.counts.iter().position(|&c| c == max).unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

pub fn histogram(nn_ms: &[f64]) -> NnHistogram {
    let bins: Vec<i64> = nn_ms
        .iter()
        .map(|x| (x / HIST_BIN_MS).floor() as i64)
        .collect();
    let lo = bins.iter().copied().min().unwrap_or(0);
    let hi = bins.iter().copied().max().unwrap_or(-1);
    let mut counts = vec![0u64; (hi - lo + 1).max(0) as usize];
    for b in bins {
        counts[(b - lo) as usize] += 1;
    }
    NnHistogram {
        first_bin: lo,
        counts,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tinn {
    pub tinn_ms: f64,
    pub hti: f64,
    /// Left base corner, as an absolute bin-edge index.
    pub n_edge: i64,
    /// Right base corner, as an absolute bin-edge index.
    pub m_edge: i64,
}

/// Error `outside + scaled / den` kept as exact integers.
#[derive(Debug, Clone, Copy)]
struct SideError {
    outside: i128,
    scaled: i128,
    den: i128,
}

impl SideError {
    fn less_than(&self, other: &SideError) -> bool {
        let a = (self.outside * self.den + self.scaled) * other.den;
        let b = (other.outside * other.den + other.scaled) * self.den;
        a < b
    }
}

pub fn tinn(rr: &RrSeries) -> Result<Tinn> {
    let nn = rr.intervals_ms();
    if nn.len() < MIN_INTERVALS {
        return Err(Error::Undetectable {
            needed: MIN_INTERVALS,
            got: nn.len(),
        });
    }
    let hist = histogram(nn);
    let mode = hist.mode();
    let height = hist.counts[mode] as i128;
    let hti = hist.total() as f64 / height as f64;

    if hist.counts.len() == 1 {
        let edge = hist.first_bin;
        return Ok(Tinn {
            tinn_ms: 0.0,
            hti: 1.0,
            n_edge: edge,
            m_edge: edge,
        });
    }

    let d: Vec<i128> = hist.counts.iter().map(|&c| c as i128).collect();
    let m = mode as i128;

    // left corner at edge j, j in 0..=mode (relative to first_bin)
    let mut best_left: Option<(usize, SideError)> = None;
    for j in 0..=mode {
        let l = 2 * (m - j as i128) + 1;
        let outside: i128 = d[..j].iter().map(|c| c * c).sum();
        let scaled: i128 = (j..mode)
            .map(|k| {
                let r = d[k] * l - height * (2 * k as i128 + 1 - 2 * j as i128);
                r * r
            })
            .sum();
        let e = SideError { outside, scaled, den: l * l };
        if best_left.as_ref().is_none_or(|(_, b)| e.less_than(b)) {
            best_left = Some((j, e));
        }
    }

    // right corner at edge j, j in mode+1 ..= len
    let n_bins = d.len();
    let mut best_right: Option<(usize, SideError)> = None;
    for j in mode + 1..=n_bins {
        let r = 2 * j as i128 - (2 * m + 1);
        let outside: i128 = d[j..].iter().map(|c| c * c).sum();
        let scaled: i128 = (mode + 1..j)
            .map(|k| {
                let e = d[k] * r - height * (2 * j as i128 - (2 * k as i128 + 1));
                e * e
            })
            .sum();
        let e = SideError { outside, scaled, den: r * r };
        if best_right.as_ref().is_none_or(|(_, b)| e.less_than(b)) {
            best_right = Some((j, e));
        }
    }

    let (jl, _) = best_left.ok_or_else(|| Error::Invariant("no left TINN corner".into()))?;
    let (jr, _) = best_right.ok_or_else(|| Error::Invariant("no right TINN corner".into()))?;
    Ok(Tinn {
        tinn_ms: (jr - jl) as f64 * HIST_BIN_MS,
        hti,
        n_edge: hist.first_bin + jl as i64,
        m_edge: hist.first_bin + jr as i64,
    })
}
