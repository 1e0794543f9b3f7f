//! Signal quality assessment for single-lead ECG.
//!
//! A record is normalised, band-passed and smoothed, cut into overlapping
//! windows, and each window is reduced to nineteen time-domain HRV features
//! computed from detected R-peaks. Classifiers trained on those features
//! decide whether a window is clean or noisy.
//!
//! ```no_run
//! use ecgsqa::{io, preprocess, rpeak, hrv};
//!
//! let rec = io::load_record("data/118e06.ecg")?;
//! let cond = preprocess::condition(&rec, &preprocess::FilterConfig::default())?;
//! let peaks = rpeak::segment_rpeaks(cond.samples(), cond.fs(), &Default::default())?;
//! let feats = hrv::compute_features(&hrv::rr_intervals(&peaks)?)?;
//! println!("{:.1}", feats.mean_nn);
//! # Ok::<(), ecgsqa::Error>(())
//! ```

// `!(x > 0.0)` is used on purpose so NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiment;
pub mod hrv;
pub mod io;
pub mod ml;
pub mod preprocess;
pub mod rpeak;
pub mod synth;

pub use error::{Error, ErrorClass, Result};
