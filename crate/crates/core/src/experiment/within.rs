use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::io::{FeatureRow, FeatureTable, Label};
use crate::ml::cross::{score_rows, training_xy};
use crate::ml::{grouped_folds, mean_report, metrics, stratified_folds, train, MetricsReport, ModelConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// Mean of per-fold metrics.
    #[default]
    Mean,
    /// Metrics of the predictions pooled over all folds.
    Pooled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WithinConfig {
    pub k: usize,
    pub aggregation: Aggregation,
    /// Keep all windows of a record in one fold.
    pub group_by_record: bool,
}

impl Default for WithinConfig {
    fn default() -> Self {
        Self {
            k: 5,
            aggregation: Aggregation::Mean,
            group_by_record: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WithinReport {
    pub dataset_id: String,
    pub model_kind: String,
    pub seed: u64,
    pub k: usize,
    pub aggregation: Aggregation,
    pub group_by_record: bool,
    pub n_rows: usize,
    pub n_invalid: usize,
    pub folds: Vec<MetricsReport>,
    pub summary: MetricsReport,
}

/// Stratified k-fold evaluation on one table.
///
/// Folds are drawn over all rows. Rows without features are left out of
/// training and scored as noisy.
pub fn within_eval(table: &FeatureTable, model: &ModelConfig, cfg: &WithinConfig, seed: u64) -> Result<WithinReport> {
    let labels = table.labels();
    let folds = if cfg.group_by_record {
        let groups: Vec<String> = table.rows.iter().map(|r| r.record_id.clone()).collect();
        grouped_folds(&groups, &labels, cfg.k, seed)?
    } else {
        stratified_folds(&labels, cfg.k, seed)?
    };
    let model = model.with_seed(seed);

    let outcomes: Vec<(Vec<usize>, Vec<Label>, Vec<f64>)> = (0..cfg.k)
        .into_par_iter()
        .map(|f| {
            let (tr, te) = folds.split(f);
            let train_rows: Vec<&FeatureRow> = tr.iter().map(|&i| &table.rows[i]).collect();
            let (x, y) = training_xy(&train_rows);
            let m = train(&x, &y, &model)?;
            let test_rows: Vec<&FeatureRow> = te.iter().map(|&i| &table.rows[i]).collect();
            let p = score_rows(&m, &test_rows)?;
            Ok((te, p.labels, p.scores))
        })
        .collect::<Result<_>>()?;

    let mut per_fold = Vec::with_capacity(cfg.k);
    for (te, pred, scores) in &outcomes {
        let truth: Vec<Label> = te.iter().map(|&i| labels[i]).collect();
        per_fold.push(metrics(&truth, pred, scores)?);
    }
    let summary = match cfg.aggregation {
        Aggregation::Mean => mean_report(&per_fold)?,
        Aggregation::Pooled => {
            let mut truth = Vec::new();
            let mut pred = Vec::new();
            let mut scores = Vec::new();
            for (te, p, s) in &outcomes {
                truth.extend(te.iter().map(|&i| labels[i]));
                pred.extend_from_slice(p);
                scores.extend_from_slice(s);
            }
            metrics(&truth, &pred, &scores)?
        }
    };
    Ok(WithinReport {
        dataset_id: table.dataset_id.clone(),
        model_kind: model.kind().as_str().to_string(),
        seed,
        k: cfg.k,
        aggregation: cfg.aggregation,
        group_by_record: cfg.group_by_record,
        n_rows: table.len(),
        n_invalid: table.invalid_count(),
        folds: per_fold,
        summary,
    })
}
