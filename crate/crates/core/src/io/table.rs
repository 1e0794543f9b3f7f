use std::collections::BTreeSet;
use std::path::Path;

use crate::error::{Error, Result};
use crate::hrv::{FeatureVector, FEATURE_NAMES, N_FEATURES};
use crate::io::Label;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub record_id: String,
    pub window_start: usize,
    /// `None` when too few R-peaks were found in the window.
    pub features: Option<FeatureVector>,
    pub label: Label,
}

impl FeatureRow {
    pub fn valid(&self) -> bool {
        self.features.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureTable {
    pub dataset_id: String,
    pub rows: Vec<FeatureRow>,
}

impl FeatureTable {
    pub fn new(dataset_id: impl Into<String>) -> Self {
        Self {
            dataset_id: dataset_id.into(),
            rows: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// `[clean, noisy]` row counts.
    pub fn label_counts(&self) -> [usize; 2] {
        let noisy = self.rows.iter().filter(|r| r.label == Label::Noisy).count();
        [self.rows.len() - noisy, noisy]
    }

    pub fn invalid_count(&self) -> usize {
        self.rows.iter().filter(|r| !r.valid()).count()
    }

    pub fn record_ids(&self) -> BTreeSet<&str> {
        self.rows.iter().map(|r| r.record_id.as_str()).collect()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.rows.iter().map(|r| r.label).collect()
    }

    /// Feature matrix and labels of the valid rows only.
    pub fn valid_xy(&self) -> (Vec<Vec<f64>>, Vec<Label>) {
        self.rows
            .iter()
            .filter_map(|r| r.features.as_ref().map(|f| (f.to_array().to_vec(), r.label)))
            .unzip()
    }
}

pub fn header() -> Vec<String> {
    let mut h = vec!["record_id".to_string(), "window_start".to_string()];
    h.extend(FEATURE_NAMES.iter().map(|s| s.to_string()));
    h.push("label".into());
    h.push("valid".into());
    h
}

pub fn write_feature_table<W: std::io::Write>(table: &FeatureTable, out: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header())?;
    for r in &table.rows {
        let feats = r.features.map_or([f64::NAN; N_FEATURES], |f| f.to_array());
        let mut rec = vec![r.record_id.clone(), r.window_start.to_string()];
        rec.extend(feats.iter().map(|v| v.to_string()));
        rec.push(r.label.as_u8().to_string());
        rec.push(u8::from(r.valid()).to_string());
        w.write_record(rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_feature_table(table: &FeatureTable, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_feature_table(table, std::io::BufWriter::new(f)).map_err(|e| Error::parse(path, 0, e.to_string()))
}

/// Loads a table; the dataset id is the file stem.
///
/// Columns are matched by name, so their order in the file is free, but
/// every expected column must be present and no other column may appear.
pub fn load_feature_table(path: impl AsRef<Path>) -> Result<FeatureTable> {
    let path = path.as_ref();
    let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let dataset_id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    read_feature_table(f, &dataset_id, path)
}

pub fn read_feature_table<R: std::io::Read>(input: R, dataset_id: &str, path: &Path) -> Result<FeatureTable> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(input);
    let head = rdr.headers().map_err(|e| Error::parse(path, 1, e.to_string()))?.clone();

    let expected = header();
    let unknown: Vec<&str> = head.iter().filter(|h| !expected.iter().any(|e| e == h)).collect();
    if !unknown.is_empty() {
        return Err(Error::parse(path, 1, format!("unknown column(s): {}", unknown.join(", "))));
    }
    let mut pos = Vec::with_capacity(expected.len());
    for e in &expected {
        let hits: Vec<usize> = head.iter().enumerate().filter(|(_, h)| h == e).map(|(i, _)| i).collect();
        match hits.len() {
            0 => return Err(Error::parse(path, 1, format!("missing column: {e}"))),
            1 => pos.push(hits[0]),
            _ => return Err(Error::parse(path, 1, format!("duplicate column: {e}"))),
        }
    }

    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::parse(path, e.position().map_or(0, |p| p.line() as usize), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != head.len() {
            return Err(Error::parse(
                path,
                line,
                format!("expected {} columns, found {}", head.len(), rec.len()),
            ));
        }
        let field = |k: usize| &rec[pos[k]];
        let window_start: usize = field(1)
            .parse()
            .map_err(|_| Error::parse(path, line, format!("bad window_start {:?}", field(1))))?;
        let mut feats = [0.0; N_FEATURES];
        for (j, v) in feats.iter_mut().enumerate() {
            *v = field(2 + j)
                .parse()
                .map_err(|_| Error::parse(path, line, format!("bad {} value {:?}", FEATURE_NAMES[j], field(2 + j))))?;
        }
        let label = field(2 + N_FEATURES)
            .parse::<u8>()
            .ok()
            .and_then(Label::from_u8)
            .ok_or_else(|| Error::parse(path, line, format!("bad label {:?}", field(2 + N_FEATURES))))?;
        let valid = match field(3 + N_FEATURES) {
            "1" => true,
            "0" => false,
            other => return Err(Error::parse(path, line, format!("bad valid flag {other:?}"))),
        };
        let features = if valid {
            let fv = FeatureVector::from_array(feats);
            if !fv.is_finite() {
                return Err(Error::parse(path, line, "valid row has non-finite features"));
            }
            Some(fv)
        } else {
            None
        };
        rows.push(FeatureRow {
            record_id: field(0).to_string(),
            window_start,
            features,
            label,
        });
    }
    Ok(FeatureTable {
        dataset_id: dataset_id.to_string(),
        rows,
    })
}
