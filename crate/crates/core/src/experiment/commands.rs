//! The command-line operations, callable from code. Each writes its
//! outputs under the config's `output_dir` and returns what it wrote.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::RunConfig;
use super::cross::{cross_matrix, CrossMatrix};
use super::data::{dataset_records, dataset_table};
use super::pipeline::DatasetSummary;
use super::report::{cross_csv, save_report, Report};
use super::sweep::{sweep_window, SweepReport};
use super::within::{within_eval, WithinReport};
use crate::error::{Error, Result};
use crate::io::{save_feature_table, FeatureTable};

fn out_dir(cfg: &RunConfig) -> Result<&Path> {
    let d = cfg.output_dir.as_path();
    std::fs::create_dir_all(d).map_err(|e| Error::io(d, e))?;
    Ok(d)
}

fn write(path: PathBuf, text: &str) -> Result<()> {
    std::fs::write(&path, text).map_err(|e| Error::io(path, e))
}

fn require_datasets(cfg: &RunConfig) -> Result<()> {
    if cfg.datasets.is_empty() {
        return Err(Error::Config("config lists no datasets".into()));
    }
    Ok(())
}

/// Builds every dataset's feature table, in config order.
pub fn build_tables(cfg: &RunConfig) -> Result<Vec<FeatureTable>> {
    let p = cfg.pipeline();
    cfg.datasets.par_iter().map(|d| dataset_table(d, &p)).collect()
}

pub fn cmd_pipeline(cfg: &RunConfig) -> Result<(Vec<FeatureTable>, Vec<DatasetSummary>)> {
    require_datasets(cfg)?;
    let tables = build_tables(cfg)?;
    let dir = out_dir(cfg)?;
    for t in &tables {
        save_feature_table(t, dir.join(format!("{}.csv", t.dataset_id)))?;
    }
    let summary: Vec<DatasetSummary> = tables.iter().map(DatasetSummary::of).collect();
    save_report(&Report::Pipeline { datasets: summary.clone() }, dir.join("pipeline.json"))?;
    Ok((tables, summary))
}

/// k-fold evaluation of one dataset, or of each dataset when `dataset` is `None`.
pub fn cmd_within(cfg: &RunConfig, dataset: Option<&str>) -> Result<Vec<WithinReport>> {
    require_datasets(cfg)?;
    let specs: Vec<_> = match dataset {
        Some(id) => vec![cfg.dataset(id)?],
        None => cfg.datasets.iter().collect(),
    };
    let dir = out_dir(cfg)?;
    let p = cfg.pipeline();
    let mut out = Vec::new();
    for spec in specs {
        let table = dataset_table(spec, &p)?;
        let r = within_eval(&table, &cfg.model, &cfg.within, cfg.seed).map_err(|e| e.context(format!("dataset {}", spec.id)))?;
        save_report(&Report::Within(r.clone()), dir.join(format!("within_{}.json", spec.id)))?;
        out.push(r);
    }
    Ok(out)
}

pub fn cmd_cross(cfg: &RunConfig) -> Result<CrossMatrix> {
    if cfg.datasets.len() < 2 {
        return Err(Error::Config("cross-dataset runs need at least two datasets".into()));
    }
    let tables = build_tables(cfg)?;
    let m = cross_matrix(&tables, &cfg.model, &cfg.cross, cfg.seed)?;
    let dir = out_dir(cfg)?;
    save_report(&Report::Cross(m.clone()), dir.join("cross.json"))?;
    write(dir.join("cross.csv"), &cross_csv(&m))?;
    Ok(m)
}

pub fn cmd_sweep_window(cfg: &RunConfig, dataset: Option<&str>, windows_s: Option<&[f64]>) -> Result<SweepReport> {
    require_datasets(cfg)?;
    let id = match dataset.or(cfg.sweep.dataset.as_deref()) {
        Some(id) => id,
        None => &cfg.datasets[0].id,
    };
    let spec = cfg.dataset(id)?;
    let windows = windows_s.unwrap_or(&cfg.sweep.windows_s);
    let records = dataset_records(spec)?;
    let r = sweep_window(id, &records, &cfg.pipeline(), windows, &cfg.model, &cfg.within, cfg.seed)?;
    let dir = out_dir(cfg)?;
    save_report(&Report::Sweep(r.clone()), dir.join(format!("sweep_{id}.json")))?;
    write(dir.join(format!("sweep_{id}.csv")), &r.to_csv())?;
    Ok(r)
}
