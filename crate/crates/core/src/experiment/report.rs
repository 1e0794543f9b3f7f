use std::path::Path;

use serde::{Deserialize, Serialize};

use super::cross::{CrossMatrix, CrossSection};
use super::pipeline::{format_summary, DatasetSummary};
use super::sweep::SweepReport;
use super::within::WithinReport;
use crate::error::{Error, Result};
use crate::ml::MetricsReport;

pub const REPORT_FORMAT_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "report", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum Report {
    Pipeline { datasets: Vec<DatasetSummary> },
    Within(WithinReport),
    Cross(CrossMatrix),
    Sweep(SweepReport),
    Metrics(MetricsReport),
}

#[derive(Serialize, Deserialize)]
struct Wire {
    format_version: u64,
    #[serde(flatten)]
    report: Report,
}

pub fn report_to_json(r: &Report) -> Result<String> {
    let w = Wire {
        format_version: REPORT_FORMAT_VERSION,
        report: r.clone(),
    };
    let mut s = serde_json::to_string_pretty(&w).map_err(|e| Error::Invariant(format!("report serialisation: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn save_report(r: &Report, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, report_to_json(r)?).map_err(|e| Error::io(path, e))
}

pub fn load_report(path: impl AsRef<Path>) -> Result<Report> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let raw: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::parse(path, e.line(), e.to_string()))?;
    let found = raw.get("format_version").and_then(|v| v.as_u64()).unwrap_or(0);
    if found != REPORT_FORMAT_VERSION {
        return Err(Error::FormatVersion { found, expected: REPORT_FORMAT_VERSION });
    }
    let w: Wire = serde_json::from_value(raw).map_err(|e| Error::parse(path, 0, e.to_string()))?;
    Ok(w.report)
}

fn cell(v: Option<f64>) -> String {
    v.map_or("n/a".to_string(), |x| format!("{x:.4}"))
}

/// Aligned table with one labelled row per metrics report.
pub fn metrics_table(rows: &[(String, &MetricsReport)]) -> String {
    let w = rows.iter().map(|(l, _)| l.len()).max().unwrap_or(0).max(5);
    let mut s = format!(
        "{:<w$}  {:>8}  {:>9}  {:>8}  {:>8}  {:>8}\n",
        "Run", "Accuracy", "Precision", "Recall", "F1 Score", "AUPRC"
    );
    for (label, m) in rows {
        s.push_str(&format!(
            "{:<w$}  {:>8}  {:>9}  {:>8}  {:>8}  {:>8}\n",
            label,
            cell(Some(m.accuracy)),
            cell(Some(m.precision_weighted)),
            cell(Some(m.recall_weighted)),
            cell(Some(m.f1_weighted)),
            cell(m.auprc)
        ));
    }
    s
}

fn section_rows<'a>(name: &str, sec: &'a CrossSection, out: &mut Vec<(String, &'a MetricsReport)>) {
    for r in &sec.reports {
        out.push((format!("{name} {}->{}", r.train_ids.join("+"), r.test_id), &r.metrics));
    }
    if let Some(a) = &sec.average {
        out.push((format!("{name} Average"), a));
    }
}

pub fn render_text(r: &Report) -> String {
    match r {
        Report::Pipeline { datasets } => format_summary(datasets),
        Report::Within(w) => {
            let mut rows: Vec<(String, &MetricsReport)> =
                w.folds.iter().enumerate().map(|(i, m)| (format!("fold {}", i + 1), m)).collect();
            let agg = match w.aggregation {
                super::within::Aggregation::Mean => "mean",
                super::within::Aggregation::Pooled => "pooled",
            };
            rows.push((format!("{} {} ({agg})", w.dataset_id, w.model_kind), &w.summary));
            metrics_table(&rows)
        }
        Report::Cross(c) => {
            let mut rows = Vec::new();
            section_rows("pair", &c.pairwise, &mut rows);
            section_rows("combined", &c.combined, &mut rows);
            section_rows("holdout", &c.holdout, &mut rows);
            section_rows("run", &c.custom, &mut rows);
            metrics_table(&rows)
        }
        Report::Sweep(s) => {
            let mut t = format!(
                "{:>8}  {:>8}  {:>9}  {:>8}  {:>8}  {:>8}\n",
                "Window", "Accuracy", "Precision", "Recall", "F1 Score", "AUPRC"
            );
            for row in &s.rows {
                t.push_str(&format!(
                    "{:>7}s  {:>8}  {:>9}  {:>8}  {:>8}  {:>8}{}\n",
                    row.window_s,
                    cell(Some(row.accuracy)),
                    cell(Some(row.precision)),
                    cell(Some(row.recall)),
                    cell(Some(row.f1)),
                    cell(row.auprc),
                    if row.best { "  *" } else { "" }
                ));
            }
            t
        }
        Report::Metrics(m) => metrics_table(&[("run".to_string(), m)]),
    }
}

/// Plot-ready rows for cross-dataset results.
pub fn cross_csv(c: &CrossMatrix) -> String {
    let mut s = String::from("section,train,test,accuracy,precision,recall,f1,auprc\n");
    let mut put = |name: &str, sec: &CrossSection| {
        for r in &sec.reports {
            let m = &r.metrics;
            s.push_str(&format!(
                "{name},{},{},{},{},{},{},{}\n",
                r.train_ids.join("+"),
                r.test_id,
                m.accuracy,
                m.precision_weighted,
                m.recall_weighted,
                m.f1_weighted,
                m.auprc.map_or("nan".into(), |v| v.to_string())
            ));
        }
    };
    put("pairwise", &c.pairwise);
    put("combined", &c.combined);
    put("holdout", &c.holdout);
    put("custom", &c.custom);
    s
}
