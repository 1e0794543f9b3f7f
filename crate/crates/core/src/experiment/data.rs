use std::path::Path;

use super::config::DatasetSpec;
use super::pipeline::{build_table, PipelineConfig};
use crate::error::{Error, Result};
use crate::io::{load_annotations, load_feature_table, load_record, record_paths, AnnotationSet, EcgRecord, FeatureTable};
use crate::synth::build_corpus;

pub type LabelledRecord = (EcgRecord, AnnotationSet);

/// Loads every `.ecg` record in `dir`, sorted by file name. A record
/// without an `.ann` file is treated as entirely clean.
pub fn load_record_dir(dir: &Path) -> Result<Vec<LabelledRecord>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();
    for e in entries {
        let p = e.map_err(|e| Error::io(dir, e))?.path();
        if p.extension().is_some_and(|x| x == "ecg") {
            paths.push(p);
        }
    }
    paths.sort();
    if paths.is_empty() {
        return Err(Error::Empty(format!("no .ecg records in {}", dir.display())));
    }
    paths
        .iter()
        .map(|p| {
            let rec = load_record(p)?;
            let ann_path = record_paths(p).0.with_extension("ann");
            let ann = if ann_path.exists() {
                let mut a = load_annotations(&ann_path)?;
                if a.record_id() != rec.record_id() {
                    a = AnnotationSet::new(rec.record_id(), a.spans().to_vec())?;
                }
                a.check_bounds(rec.len()).map_err(|e| e.context(ann_path.display().to_string()))?;
                a
            } else {
                AnnotationSet::all_clean(rec.record_id())
            };
            Ok((rec, ann))
        })
        .collect()
}

/// Raw records of a dataset; feature-table datasets have none.
pub fn dataset_records(spec: &DatasetSpec) -> Result<Vec<LabelledRecord>> {
    if let Some(dir) = &spec.records {
        return load_record_dir(dir);
    }
    if let Some(s) = &spec.synth {
        return Ok(build_corpus(&spec.id, s)?
            .into_iter()
            .map(|r| (r.record, r.annotations))
            .collect());
    }
    Err(Error::Config(format!(
        "dataset {:?} is a feature table; this step needs raw records",
        spec.id
    )))
}

pub fn dataset_table(spec: &DatasetSpec, cfg: &PipelineConfig) -> Result<FeatureTable> {
    if let Some(p) = &spec.table {
        let mut t = load_feature_table(p)?;
        t.dataset_id = spec.id.clone();
        return Ok(t);
    }
    let records = dataset_records(spec)?;
    build_table(&spec.id, &records, cfg).map_err(|e| e.context(format!("dataset {}", spec.id)))
}
