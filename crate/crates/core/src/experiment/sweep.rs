use serde::{Deserialize, Serialize};

use super::data::LabelledRecord;
use super::pipeline::{build_table, PipelineConfig};
use super::within::{within_eval, WithinConfig};
use crate::error::{Error, Result};
use crate::ml::ModelConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub window_s: f64,
    pub n_windows: usize,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub auprc: Option<f64>,
    /// Set on the first row with the highest F1.
    pub best: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub dataset_id: String,
    pub model_kind: String,
    pub seed: u64,
    pub rows: Vec<SweepRow>,
}

/// Reruns feature extraction and k-fold evaluation per window length.
pub fn sweep_window(
    dataset_id: &str,
    records: &[LabelledRecord],
    pipeline: &PipelineConfig,
    windows_s: &[f64],
    model: &ModelConfig,
    within: &WithinConfig,
    seed: u64,
) -> Result<SweepReport> {
    if windows_s.is_empty() {
        return Err(Error::InvalidParameter("window list is empty".into()));
    }
    let mut rows = Vec::with_capacity(windows_s.len());
    for &w in windows_s {
        let mut cfg = *pipeline;
        cfg.segmentation.window_seconds = w;
        let table = build_table(dataset_id, records, &cfg)?;
        let r = within_eval(&table, model, within, seed).map_err(|e| e.context(format!("window {w} s")))?;
        rows.push(SweepRow {
            window_s: w,
            n_windows: table.len(),
            accuracy: r.summary.accuracy,
            precision: r.summary.precision_weighted,
            recall: r.summary.recall_weighted,
            f1: r.summary.f1_weighted,
            auprc: r.summary.auprc,
            best: false,
        });
    }
    let mut best = 0;
    for (i, r) in rows.iter().enumerate() {
        if r.f1 > rows[best].f1 {
            best = i;
        }
    }
    rows[best].best = true;
    Ok(SweepReport {
        dataset_id: dataset_id.to_string(),
        model_kind: model.kind().as_str().to_string(),
        seed,
        rows,
    })
}

impl SweepReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("window_s,n_windows,accuracy,precision,recall,f1,auprc,best\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.window_s,
                r.n_windows,
                r.accuracy,
                r.precision,
                r.recall,
                r.f1,
                r.auprc.map_or("nan".to_string(), |v| v.to_string()),
                u8::from(r.best)
            ));
        }
        s
    }
}
