use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::FeatureTable;
use crate::ml::cross::{cross_eval, CrossReport};
use crate::ml::{mean_report, MetricsReport, ModelConfig};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub train: Vec<String>,
    pub test: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CrossConfig {
    /// Datasets kept out of pairwise and combined runs and used only as
    /// test sets for every combination of the others.
    pub holdout: Vec<String>,
    pub pairwise: bool,
    pub combined: bool,
    /// Extra train/test runs.
    pub runs: Vec<RunSpec>,
}

impl Default for CrossConfig {
    fn default() -> Self {
        Self {
            holdout: Vec::new(),
            pairwise: true,
            combined: true,
            runs: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossSection {
    pub reports: Vec<CrossReport>,
    /// Field-wise mean of the reports' metrics.
    pub average: Option<MetricsReport>,
}

impl CrossSection {
    fn of(reports: Vec<CrossReport>) -> Result<Self> {
        let average = if reports.is_empty() {
            None
        } else {
            let m: Vec<MetricsReport> = reports.iter().map(|r| r.metrics.clone()).collect();
            Some(mean_report(&m)?)
        };
        Ok(Self { reports, average })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossMatrix {
    pub model_kind: String,
    pub seed: u64,
    pub pairwise: CrossSection,
    pub combined: CrossSection,
    pub holdout: CrossSection,
    pub custom: CrossSection,
}

fn find<'a>(tables: &'a [FeatureTable], id: &str) -> Result<&'a FeatureTable> {
    tables
        .iter()
        .find(|t| t.dataset_id == id)
        .ok_or_else(|| Error::Config(format!("no dataset with id {id:?}")))
}

/// Trains on the named tables and tests on `test`.
pub fn run_one(tables: &[FeatureTable], train: &[&str], test: &str, model: &ModelConfig) -> Result<CrossReport> {
    if train.contains(&test) {
        return Err(Error::TrainTestOverlap(format!("dataset {test}")));
    }
    let tr: Vec<&FeatureTable> = train.iter().map(|id| find(tables, id)).collect::<Result<_>>()?;
    cross_eval(&tr, find(tables, test)?, model)
}

/// All ordered pairs, leave-one-out combinations, and holdout runs.
pub fn cross_matrix(tables: &[FeatureTable], model: &ModelConfig, cfg: &CrossConfig, seed: u64) -> Result<CrossMatrix> {
    for (i, t) in tables.iter().enumerate() {
        if tables[..i].iter().any(|o| o.dataset_id == t.dataset_id) {
            return Err(Error::Config(format!("duplicate dataset id {:?}", t.dataset_id)));
        }
    }
    for h in &cfg.holdout {
        find(tables, h)?;
    }
    let model = model.with_seed(seed);
    let pool: Vec<&str> = tables
        .iter()
        .map(|t| t.dataset_id.as_str())
        .filter(|id| !cfg.holdout.iter().any(|h| h == id))
        .collect();

    let mut pairwise = Vec::new();
    if cfg.pairwise {
        for &tr in &pool {
            for &te in &pool {
                if tr != te {
                    pairwise.push(run_one(tables, &[tr], te, &model)?);
                }
            }
        }
    }

    let mut combined = Vec::new();
    if cfg.combined && pool.len() >= 3 {
        for &te in &pool {
            let rest: Vec<&str> = pool.iter().copied().filter(|&d| d != te).collect();
            combined.push(run_one(tables, &rest, te, &model)?);
        }
    }

    let mut holdout = Vec::new();
    if !cfg.holdout.is_empty() && !pool.is_empty() {
        let mut subsets: Vec<Vec<&str>> = (1u64..(1 << pool.len()))
            .map(|mask| pool.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, d)| *d).collect())
            .collect();
        subsets.sort_by_key(|s| s.len());
        for h in &cfg.holdout {
            for s in &subsets {
                holdout.push(run_one(tables, s, h, &model)?);
            }
        }
    }

    let custom = cfg
        .runs
        .iter()
        .map(|r| {
            let train: Vec<&str> = r.train.iter().map(String::as_str).collect();
            run_one(tables, &train, &r.test, &model)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(CrossMatrix {
        model_kind: model.kind().as_str().to_string(),
        seed,
        pairwise: CrossSection::of(pairwise)?,
        combined: CrossSection::of(combined)?,
        holdout: CrossSection::of(holdout)?,
        custom: CrossSection::of(custom)?,
    })
}
