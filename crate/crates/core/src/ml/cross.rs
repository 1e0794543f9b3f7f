use serde::{Deserialize, Serialize};

use super::{metrics, predict, train, MetricsReport, ModelArtifact, ModelConfig, Predictions};
use crate::error::{Error, Result};
use crate::io::{FeatureRow, FeatureTable, Label};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossReport {
    pub train_ids: Vec<String>,
    pub test_id: String,
    pub model_kind: String,
    pub seed: u64,
    pub n_train: usize,
    pub n_test: usize,
    pub n_test_invalid: usize,
    pub metrics: MetricsReport,
}

/// Scores rows; rows without features are labelled noisy with score 1.
pub fn score_rows(model: &ModelArtifact, rows: &[&FeatureRow]) -> Result<Predictions> {
    let x: Vec<Vec<f64>> = rows
        .iter()
        .filter_map(|r| r.features.as_ref().map(|f| f.to_array().to_vec()))
        .collect();
    let p = predict(model, &x)?;
    let mut valid = p.scores.into_iter();
    let scores: Vec<f64> = rows
        .iter()
        .map(|r| if r.valid() { valid.next().unwrap_or(1.0) } else { 1.0 })
        .collect();
    Ok(Predictions {
        labels: scores.iter().map(|&s| super::label_for(s)).collect(),
        scores,
    })
}

/// Training matrix from valid rows only.
pub fn training_xy(rows: &[&FeatureRow]) -> (Vec<Vec<f64>>, Vec<Label>) {
    rows.iter()
        .filter_map(|r| r.features.as_ref().map(|f| (f.to_array().to_vec(), r.label)))
        .unzip()
}

/// Trains once on the union of `train` and evaluates every row of `test`.
pub fn cross_eval(train_tables: &[&FeatureTable], test: &FeatureTable, cfg: &ModelConfig) -> Result<CrossReport> {
    if train_tables.is_empty() {
        return Err(Error::Empty("no training tables".into()));
    }
    if test.is_empty() {
        return Err(Error::Empty(format!("test table {} has no rows", test.dataset_id)));
    }
    let test_ids = test.record_ids();
    for t in train_tables {
        if let Some(id) = t.record_ids().into_iter().find(|id| test_ids.contains(id)) {
            return Err(Error::TrainTestOverlap(id.to_string()));
        }
    }
    let rows: Vec<&FeatureRow> = train_tables.iter().flat_map(|t| t.rows.iter()).collect();
    let (x, y) = training_xy(&rows);
    let ids: Vec<String> = train_tables.iter().map(|t| t.dataset_id.clone()).collect();
    let model = train(&x, &y, cfg)?.with_dataset_ids(ids.clone());

    let test_rows: Vec<&FeatureRow> = test.rows.iter().collect();
    let p = score_rows(&model, &test_rows)?;
    Ok(CrossReport {
        train_ids: ids,
        test_id: test.dataset_id.clone(),
        model_kind: cfg.kind().as_str().to_string(),
        seed: cfg.seed(),
        n_train: x.len(),
        n_test: test.len(),
        n_test_invalid: test.invalid_count(),
        metrics: metrics(&test.labels(), &p.labels, &p.scores)?,
    })
}
