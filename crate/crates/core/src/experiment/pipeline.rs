use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hrv::{compute_features, rr_intervals};
use crate::io::{AnnotationSet, EcgRecord, FeatureRow, FeatureTable};
use crate::preprocess::{condition, segment, FilterConfig, SegmentationConfig};
use crate::rpeak::{segment_rpeaks, DetectorConfig};

/// Settings shared by every stage from raw record to feature row.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub segmentation: SegmentationConfig,
    pub filter: FilterConfig,
    pub detector: DetectorConfig,
}

/// Conditions the whole record, cuts it into windows, and computes the
/// HRV features of each window. Windows with fewer than four RR intervals
/// come back without features.
pub fn record_features(record: &EcgRecord, ann: &AnnotationSet, cfg: &PipelineConfig) -> Result<Vec<FeatureRow>> {
    let id = record.record_id();
    let cond = condition(record, &cfg.filter).map_err(|e| e.context(format!("record {id}")))?;
    let seg = segment(&cond, ann, &cfg.segmentation).map_err(|e| e.context(format!("record {id}")))?;
    seg.segments
        .iter()
        .map(|w| {
            let at = || format!("record {id}, window at sample {}", w.start_index);
            let peaks = segment_rpeaks(&w.samples, w.fs, &cfg.detector).map_err(|e| e.context(at()))?;
            let features = match rr_intervals(&peaks).and_then(|rr| compute_features(&rr)) {
                Ok(f) => Some(f),
                Err(Error::InsufficientPeaks(_)) | Err(Error::Undetectable { .. }) => None,
                Err(e) => return Err(e.context(at())),
            };
            Ok(FeatureRow {
                record_id: id.to_string(),
                window_start: w.start_index,
                features,
                label: w.label,
            })
        })
        .collect()
}

/// Runs [`record_features`] over records in parallel, keeping input order.
pub fn build_table(dataset_id: &str, records: &[(EcgRecord, AnnotationSet)], cfg: &PipelineConfig) -> Result<FeatureTable> {
    let per: Vec<Vec<FeatureRow>> = records
        .par_iter()
        .map(|(r, a)| record_features(r, a, cfg))
        .collect::<Result<_>>()?;
    Ok(FeatureTable {
        dataset_id: dataset_id.to_string(),
        rows: per.into_iter().flatten().collect(),
    })
}

/// Window counts per dataset in the layout of a clean/noisy segment table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub dataset_id: String,
    pub records: usize,
    pub clean: usize,
    pub noisy: usize,
    pub invalid: usize,
}

impl DatasetSummary {
    pub fn of(table: &FeatureTable) -> Self {
        let [clean, noisy] = table.label_counts();
        Self {
            dataset_id: table.dataset_id.clone(),
            records: table.record_ids().len(),
            clean,
            noisy,
            invalid: table.invalid_count(),
        }
    }

    pub fn total(&self) -> usize {
        self.clean + self.noisy
    }
}

pub fn format_summary(rows: &[DatasetSummary]) -> String {
    let w = rows.iter().map(|r| r.dataset_id.len()).max().unwrap_or(0).max(7);
    let mut s = format!(
        "{:<w$}  {:>7}  {:>7}  {:>7}  {:>7}  {:>12}\n",
        "Dataset", "Records", "Clean", "Noisy", "Total", "Undetectable"
    );
    for r in rows {
        s.push_str(&format!(
            "{:<w$}  {:>7}  {:>7}  {:>7}  {:>7}  {:>12}\n",
            r.dataset_id,
            r.records,
            r.clean,
            r.noisy,
            r.total(),
            r.invalid
        ));
    }
    s
}

