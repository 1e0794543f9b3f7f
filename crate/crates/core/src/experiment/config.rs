use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::cross::CrossConfig;
use super::pipeline::PipelineConfig;
use super::within::WithinConfig;
use crate::error::{Error, Result};
use crate::ml::ModelConfig;
use crate::preprocess::{FilterConfig, SegmentationConfig};
use crate::rpeak::DetectorConfig;
use crate::synth::CorpusSpec;

/// Environment variable that replaces the configured seed.
pub const SEED_ENV: &str = "ECGSQA_SEED";

/// Where a dataset's windows come from. Exactly one source must be set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSpec {
    pub id: String,
    /// Directory of `.ecg`/`.meta`/`.ann` records.
    #[serde(default)]
    pub records: Option<PathBuf>,
    /// Precomputed feature table.
    #[serde(default)]
    pub table: Option<PathBuf>,
    /// Synthetic corpus generated in memory.
    #[serde(default)]
    pub synth: Option<CorpusSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub dataset: Option<String>,
    pub windows_s: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            dataset: None,
            windows_s: vec![5.0, 10.0, 15.0, 20.0, 25.0, 30.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub output_dir: PathBuf,
    #[serde(rename = "dataset")]
    pub datasets: Vec<DatasetSpec>,
    pub segmentation: SegmentationConfig,
    pub filter: FilterConfig,
    pub detector: DetectorConfig,
    pub model: ModelConfig,
    pub within: WithinConfig,
    pub cross: CrossConfig,
    pub sweep: SweepConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            output_dir: PathBuf::from("out"),
            datasets: Vec::new(),
            segmentation: Default::default(),
            filter: Default::default(),
            detector: Default::default(),
            model: Default::default(),
            within: Default::default(),
            cross: Default::default(),
            sweep: Default::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file. Relative paths inside it are resolved against
    /// the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text).map_err(|e| e.context(path.display().to_string()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut cfg.output_dir);
        for d in &mut cfg.datasets {
            if let Some(p) = d.records.as_mut() {
                resolve(p);
            }
            if let Some(p) = d.table.as_mut() {
                resolve(p);
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Applies `ECGSQA_SEED` if it is set.
    pub fn apply_env(&mut self) -> Result<()> {
        if let Ok(v) = std::env::var(SEED_ENV) {
            self.seed = v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{SEED_ENV}={v:?} is not an unsigned integer")))?;
        }
        Ok(())
    }

    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            segmentation: self.segmentation,
            filter: self.filter,
            detector: self.detector,
        }
    }

    pub fn dataset(&self, id: &str) -> Result<&DatasetSpec> {
        self.datasets
            .iter()
            .find(|d| d.id == id)
            .ok_or_else(|| Error::Config(format!("no dataset with id {id:?}")))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        for (i, d) in self.datasets.iter().enumerate() {
            if d.id.is_empty() {
                return bad(format!("dataset #{i} has an empty id"));
            }
            if self.datasets[..i].iter().any(|o| o.id == d.id) {
                return bad(format!("duplicate dataset id {:?}", d.id));
            }
            let sources = [d.records.is_some(), d.table.is_some(), d.synth.is_some()];
            if sources.iter().filter(|s| **s).count() != 1 {
                return bad(format!("dataset {:?} needs exactly one of records, table, synth", d.id));
            }
            if let Some(s) = &d.synth {
                s.validate().map_err(|e| Error::Config(format!("dataset {:?}: {e}", d.id)))?;
            }
        }
        let usage = |e: Error| Error::Config(e.to_string());
        self.segmentation.validate().map_err(usage)?;
        self.detector.validate().map_err(usage)?;
        self.model.validate().map_err(usage)?;
        if self.within.k < 2 {
            return bad("within.k must be >= 2".into());
        }
        for h in &self.cross.holdout {
            self.dataset(h)?;
        }
        if let Some(d) = &self.sweep.dataset {
            self.dataset(d)?;
        }
        if self.sweep.windows_s.iter().any(|w| !(*w > 0.0)) {
            return bad("sweep window lengths must be positive".into());
        }
        Ok(())
    }
}
