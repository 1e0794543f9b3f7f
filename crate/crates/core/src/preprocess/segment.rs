use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{AnnotationSet, EcgRecord, Label};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SegmentationConfig {
    pub window_seconds: f64,
    pub overlap_fraction: f64,
    /// Minimum fraction of noisy samples for a noisy window (inclusive).
    pub noisy_threshold: f64,
}

impl Default for SegmentationConfig {
    fn default() -> Self {
        Self {
            window_seconds: 20.0,
            overlap_fraction: 0.5,
            noisy_threshold: 0.5,
        }
    }
}

impl SegmentationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.window_seconds > 0.0) {
            return Err(Error::InvalidParameter("window_seconds must be > 0".into()));
        }
        if !(0.0..1.0).contains(&self.overlap_fraction) {
            return Err(Error::InvalidParameter("overlap_fraction must be in [0, 1)".into()));
        }
        if !(self.noisy_threshold > 0.0 && self.noisy_threshold <= 1.0) {
            return Err(Error::InvalidParameter("noisy_threshold must be in (0, 1]".into()));
        }
        Ok(())
    }

    pub fn window_len(&self, fs: f64) -> usize {
        (self.window_seconds * fs).round() as usize
    }

    pub fn stride(&self, fs: f64) -> usize {
        ((self.window_len(fs) as f64 * (1.0 - self.overlap_fraction)).round() as usize).max(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub record_id: String,
    pub start_index: usize,
    pub samples: Vec<f64>,
    pub label: Label,
    pub fs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation {
    pub segments: Vec<Segment>,
    /// Set when the record was shorter than one window.
    pub short_record: bool,
}

/// 1 iff the noisy share of `[start, start + window_len)` reaches `threshold`.
pub fn label_window(
    annotations: &AnnotationSet,
    start_index: usize,
    window_len: usize,
    threshold: f64,
) -> Label {
    if window_len == 0 {
        return Label::Clean;
    }
    let noisy = annotations.noisy_count(start_index, window_len);
    if noisy as f64 / window_len as f64 >= threshold {
        Label::Noisy
    } else {
        Label::Clean
    }
}

/// Cuts windows at `k * stride`; a trailing partial window is dropped.
pub fn segment(
    record: &EcgRecord,
    annotations: &AnnotationSet,
    cfg: &SegmentationConfig,
) -> Result<Segmentation> {
    cfg.validate()?;
    annotations.check_bounds(record.len())?;
    let fs = record.fs();
    let w = cfg.window_len(fs);
    let stride = cfg.stride(fs);
    let n = record.len();
    if w == 0 || n < w {
        return Ok(Segmentation {
            segments: Vec::new(),
            short_record: true,
        });
    }
    let count = (n - w) / stride + 1;
    let x = record.samples();
    let segments = (0..count)
        .map(|k| {
            let start = k * stride;
            Segment {
                record_id: record.record_id().to_string(),
                start_index: start,
                samples: x[start..start + w].to_vec(),
                label: label_window(annotations, start, w, cfg.noisy_threshold),
                fs,
            }
        })
        .collect();
    Ok(Segmentation {
        segments,
        short_record: false,
    })
}
