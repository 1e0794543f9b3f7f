use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DecisionTree, LogisticRegression, Model, ModelArtifact, ModelKind, RandomForest, TrainingMeta};
use crate::error::{Error, Result};

pub const MODEL_FORMAT_VERSION: u64 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Wire {
    format_version: u64,
    model_kind: String,
    feature_order: Vec<String>,
    training_meta: TrainingMeta,
    parameters: serde_json::Value,
}

fn to_value<T: Serialize>(v: &T) -> Result<serde_json::Value> {
    serde_json::to_value(v).map_err(|e| Error::Invariant(format!("model serialisation: {e}")))
}

pub fn model_to_json(a: &ModelArtifact) -> Result<String> {
    let parameters = match &a.model {
        Model::Logreg(m) => to_value(m)?,
        Model::Dtree(m) => to_value(m)?,
        Model::Rforest(m) => to_value(m)?,
    };
    let wire = Wire {
        format_version: MODEL_FORMAT_VERSION,
        model_kind: a.kind().as_str().to_string(),
        feature_order: a.feature_order.clone(),
        training_meta: a.meta.clone(),
        parameters,
    };
    serde_json::to_string_pretty(&wire).map_err(|e| Error::Invariant(format!("model serialisation: {e}")))
}

fn json_error(path: &Path, e: &serde_json::Error) -> Error {
    Error::parse(path, e.line(), e.to_string())
}

pub fn model_from_json(text: &str, path: &Path) -> Result<ModelArtifact> {
    let raw: serde_json::Value = serde_json::from_str(text).map_err(|e| json_error(path, &e))?;
    let found = raw.get("format_version").and_then(|v| v.as_u64()).unwrap_or(0);
    if found != MODEL_FORMAT_VERSION {
        return Err(Error::FormatVersion { found, expected: MODEL_FORMAT_VERSION });
    }
    if let Some(kind) = raw.get("model_kind").and_then(|v| v.as_str()) {
        ModelKind::parse(kind)?;
    }
    let wire: Wire = serde_json::from_value(raw).map_err(|e| json_error(path, &e))?;
    let kind = ModelKind::parse(&wire.model_kind)?;
    let bad = |e: serde_json::Error| Error::parse(path, 0, format!("parameters: {e}"));
    let model = match kind {
        ModelKind::Logreg => Model::Logreg(serde_json::from_value::<LogisticRegression>(wire.parameters).map_err(bad)?),
        ModelKind::Dtree => Model::Dtree(serde_json::from_value::<DecisionTree>(wire.parameters).map_err(bad)?),
        ModelKind::Rforest => Model::Rforest(serde_json::from_value::<RandomForest>(wire.parameters).map_err(bad)?),
    };
    check_model(&model, path)?;
    if wire.feature_order.len() != model.n_features() {
        return Err(Error::DimensionMismatch {
            expected: model.n_features(),
            got: wire.feature_order.len(),
        });
    }
    if wire.training_meta.hyperparameters.kind() != kind {
        return Err(Error::parse(path, 0, "hyperparameters do not match model_kind"));
    }
    Ok(ModelArtifact {
        model,
        feature_order: wire.feature_order,
        meta: wire.training_meta,
    })
}

fn check_model(model: &Model, path: &Path) -> Result<()> {
    let bad = |r: String| Error::parse(path, 0, r);
    match model {
        Model::Logreg(m) => {
            if let Some(s) = &m.scaler {
                if s.mean.len() != m.weights.len() || s.scale.len() != m.weights.len() {
                    return Err(bad("scaler length differs from weights".into()));
                }
            }
        }
        Model::Dtree(t) => t.validate().map_err(|e| bad(e.to_string()))?,
        Model::Rforest(f) => {
            if f.trees.is_empty() {
                return Err(bad("forest has no trees".into()));
            }
            for t in &f.trees {
                if t.n_features != f.n_features {
                    return Err(bad("tree feature count differs from forest".into()));
                }
                t.validate().map_err(|e| bad(e.to_string()))?;
            }
        }
    }
    Ok(())
}

pub fn save_model(a: &ModelArtifact, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, model_to_json(a)?).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelArtifact> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    model_from_json(&text, path)
}
