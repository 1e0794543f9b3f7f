//! Classifiers, cross-validation folds and evaluation metrics.
//!
//! Scores are the probability of the noisy class. A score strictly above
//! 0.5 is labelled noisy; an exact tie goes to clean.

mod artifact;
pub mod cross;
pub mod folds;
pub mod forest;
pub mod logreg;
pub mod metrics;
pub mod tree;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hrv::{FEATURE_NAMES, N_FEATURES};
use crate::io::Label;

pub use artifact::{load_model, save_model, MODEL_FORMAT_VERSION};
pub use cross::cross_eval;
pub use folds::{grouped_folds, stratified_folds, FoldAssignment};
pub use forest::{ForestConfig, RandomForest};
pub use logreg::{LogRegConfig, LogisticRegression};
pub use metrics::{average_precision, mean_report, metrics, MetricsReport};
pub use tree::{DecisionTree, TreeConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Logreg,
    Dtree,
    Rforest,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Logreg => "logreg",
            ModelKind::Dtree => "dtree",
            ModelKind::Rforest => "rforest",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "logreg" => Ok(ModelKind::Logreg),
            "dtree" => Ok(ModelKind::Dtree),
            "rforest" => Ok(ModelKind::Rforest),
            other => Err(Error::UnsupportedModelKind(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelConfig {
    Logreg(LogRegConfig),
    Dtree(TreeConfig),
    Rforest(ForestConfig),
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig::Rforest(ForestConfig::default())
    }
}

impl ModelConfig {
    pub fn default_for(kind: ModelKind) -> Self {
        match kind {
            ModelKind::Logreg => ModelConfig::Logreg(Default::default()),
            ModelKind::Dtree => ModelConfig::Dtree(Default::default()),
            ModelKind::Rforest => ModelConfig::Rforest(Default::default()),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            ModelConfig::Logreg(_) => ModelKind::Logreg,
            ModelConfig::Dtree(_) => ModelKind::Dtree,
            ModelConfig::Rforest(_) => ModelKind::Rforest,
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            ModelConfig::Logreg(c) => c.seed,
            ModelConfig::Dtree(c) => c.seed,
            ModelConfig::Rforest(c) => c.seed,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        match &mut self {
            ModelConfig::Logreg(c) => c.seed = seed,
            ModelConfig::Dtree(c) => c.seed = seed,
            ModelConfig::Rforest(c) => c.seed = seed,
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelConfig::Logreg(c) => c.validate(),
            ModelConfig::Dtree(c) => c.validate(),
            ModelConfig::Rforest(c) => c.validate(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Logreg(LogisticRegression),
    Dtree(DecisionTree),
    Rforest(RandomForest),
}

impl Model {
    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Logreg(_) => ModelKind::Logreg,
            Model::Dtree(_) => ModelKind::Dtree,
            Model::Rforest(_) => ModelKind::Rforest,
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            Model::Logreg(m) => m.n_features(),
            Model::Dtree(m) => m.n_features,
            Model::Rforest(m) => m.n_features,
        }
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        match self {
            Model::Logreg(m) => m.score(x),
            Model::Dtree(m) => m.score(x),
            Model::Rforest(m) => m.score(x),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub seed: u64,
    pub dataset_ids: Vec<String>,
    pub n_train: usize,
    pub hyperparameters: ModelConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelArtifact {
    pub model: Model,
    pub feature_order: Vec<String>,
    pub meta: TrainingMeta,
}

impl ModelArtifact {
    pub fn with_dataset_ids(mut self, ids: Vec<String>) -> Self {
        self.meta.dataset_ids = ids;
        self
    }

    pub fn kind(&self) -> ModelKind {
        self.model.kind()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Predictions {
    pub labels: Vec<Label>,
    pub scores: Vec<f64>,
}

pub fn label_for(score: f64) -> Label {
    if score > 0.5 {
        Label::Noisy
    } else {
        Label::Clean
    }
}

/// Checks shape and finiteness; returns the feature count.
pub(crate) fn check_design(x: &[Vec<f64>], y: &[Label]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    let Some(first) = x.first() else {
        return Err(Error::Empty("training set has no rows".into()));
    };
    let d = first.len();
    if d == 0 {
        return Err(Error::Empty("training rows have no features".into()));
    }
    for (i, r) in x.iter().enumerate() {
        if r.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: r.len() });
        }
        if r.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("row {i} has a non-finite feature")));
        }
    }
    Ok(d)
}

pub(crate) fn has_both_classes(y: &[Label]) -> bool {
    y.contains(&Label::Clean) && y.contains(&Label::Noisy)
}

fn default_feature_order(d: usize) -> Vec<String> {
    if d == N_FEATURES {
        FEATURE_NAMES.iter().map(|s| s.to_string()).collect()
    } else {
        (0..d).map(|j| format!("x{j}")).collect()
    }
}

/// Trains the configured model. Feature names default to the HRV names
/// when there are nineteen columns.
pub fn train(x: &[Vec<f64>], y: &[Label], cfg: &ModelConfig) -> Result<ModelArtifact> {
    let model = match cfg {
        ModelConfig::Logreg(c) => Model::Logreg(logreg::fit(x, y, c)?),
        ModelConfig::Dtree(c) => Model::Dtree(tree::fit(x, y, c)?),
        ModelConfig::Rforest(c) => Model::Rforest(forest::fit(x, y, c)?),
    };
    Ok(ModelArtifact {
        feature_order: default_feature_order(model.n_features()),
        model,
        meta: TrainingMeta {
            seed: cfg.seed(),
            dataset_ids: Vec::new(),
            n_train: x.len(),
            hyperparameters: *cfg,
        },
    })
}

pub fn train_logreg(x: &[Vec<f64>], y: &[Label], cfg: &LogRegConfig) -> Result<ModelArtifact> {
    train(x, y, &ModelConfig::Logreg(*cfg))
}

pub fn train_dtree(x: &[Vec<f64>], y: &[Label], cfg: &TreeConfig) -> Result<ModelArtifact> {
    train(x, y, &ModelConfig::Dtree(*cfg))
}

pub fn train_rf(x: &[Vec<f64>], y: &[Label], cfg: &ForestConfig) -> Result<ModelArtifact> {
    train(x, y, &ModelConfig::Rforest(*cfg))
}

pub fn predict(model: &ModelArtifact, x: &[Vec<f64>]) -> Result<Predictions> {
    let d = model.model.n_features();
    if let Some(r) = x.iter().find(|r| r.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: r.len() });
    }
    let scores: Vec<f64> = x.par_iter().map(|r| model.model.score(r)).collect();
    Ok(Predictions {
        labels: scores.iter().map(|&s| label_for(s)).collect(),
        scores,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tie_goes_to_clean() {
        assert_eq!(label_for(0.5), Label::Clean);
        assert_eq!(label_for(0.5000001), Label::Noisy);
    }

    #[test]
    fn dimension_checked() {
        let x = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let m = train(&x, &[Label::Clean, Label::Noisy], &ModelConfig::Dtree(Default::default())).unwrap();
        assert_eq!(m.feature_order, vec!["x0", "x1"]);
        assert!(matches!(predict(&m, &[vec![1.0]]), Err(Error::DimensionMismatch { expected: 2, got: 1 })));
    }

    #[test]
    fn pure_forest_scores_one() {
        let leaf = DecisionTree { n_features: 1, nodes: vec![tree::Node::Leaf { p: 1.0 }] };
        let f = RandomForest { n_features: 1, trees: vec![leaf; 5] };
        assert_eq!(f.score(&[3.0]), 1.0);
    }
}
