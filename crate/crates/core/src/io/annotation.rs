use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary window/sample label. Noisy is the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Clean = 0,
    Noisy = 1,
}

impl Label {
    pub fn from_u8(v: u8) -> Option<Self> {
        match v {
            0 => Some(Label::Clean),
            1 => Some(Label::Noisy),
            _ => None,
        }
    }

    pub fn as_u8(self) -> u8 {
        self as u8
    }
}

/// Half-open sample-index span `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnnotationSpan {
    pub start: usize,
    pub end: usize,
    pub label: Label,
}

impl AnnotationSpan {
    pub fn new(start: usize, end: usize, label: Label) -> Result<Self> {
        if end <= start {
            return Err(Error::InvalidParameter(format!(
                "span end {end} must exceed start {start}"
            )));
        }
        Ok(Self { start, end, label })
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }
}

/// Sorted, non-overlapping spans over one record. Uncovered indices are clean.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AnnotationSet {
    record_id: String,
    spans: Vec<AnnotationSpan>,
}

impl AnnotationSet {
    pub fn new(record_id: impl Into<String>, spans: Vec<AnnotationSpan>) -> Result<Self> {
        for w in spans.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b.start < a.end {
                if b.start >= a.start {
                    return Err(Error::OverlappingSpans(a.start, a.end, b.start, b.end));
                }
                // b starts before a: either overlapping or just out of order
                if b.end > a.start {
                    return Err(Error::OverlappingSpans(a.start, a.end, b.start, b.end));
                }
                return Err(Error::InvalidParameter(format!(
                    "spans out of order: [{}, {}) follows [{}, {})",
                    b.start, b.end, a.start, a.end
                )));
            }
        }
        Ok(Self {
            record_id: record_id.into(),
            spans,
        })
    }

    pub fn all_clean(record_id: impl Into<String>) -> Self {
        Self {
            record_id: record_id.into(),
            spans: Vec::new(),
        }
    }

    pub fn record_id(&self) -> &str {
        &self.record_id
    }

    pub fn spans(&self) -> &[AnnotationSpan] {
        &self.spans
    }

    /// Range check, deferred until the set is paired with a record.
    pub fn check_bounds(&self, record_len: usize) -> Result<()> {
        match self.spans.last() {
            Some(s) if s.end > record_len => Err(Error::SpanOutOfRange {
                start: s.start,
                end: s.end,
                len: record_len,
            }),
            _ => Ok(()),
        }
    }

    /// Number of noisy indices in `[start, start + len)`.
    pub fn noisy_count(&self, start: usize, len: usize) -> usize {
        let end = start + len;
        // spans are sorted by start and disjoint, so also sorted by end
        let first = self.spans.partition_point(|s| s.end <= start);
        self.spans[first..]
            .iter()
            .take_while(|s| s.start < end)
            .filter(|s| s.label == Label::Noisy)
            .map(|s| s.end.min(end) - s.start.max(start))
            .sum()
    }

    pub fn noisy_total(&self) -> usize {
        self.spans
            .iter()
            .filter(|s| s.label == Label::Noisy)
            .map(AnnotationSpan::len)
            .sum()
    }
}

pub fn load_annotations(path: impl AsRef<Path>) -> Result<AnnotationSet> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let record_id = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or_default()
        .to_string();
    let mut spans = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::parse(
                path,
                i + 1,
                format!("expected `start end label`, got {} fields", fields.len()),
            ));
        }
        let num = |s: &str, what: &str| -> Result<usize> {
            s.parse()
                .map_err(|_| Error::parse(path, i + 1, format!("bad {what} {s:?}")))
        };
        let start = num(fields[0], "start")?;
        let end = num(fields[1], "end")?;
        let label = fields[2]
            .parse::<u8>()
            .ok()
            .and_then(Label::from_u8)
            .ok_or_else(|| Error::parse(path, i + 1, format!("bad label {:?}", fields[2])))?;
        if end <= start {
            return Err(Error::parse(path, i + 1, format!("end {end} <= start {start}")));
        }
        if let Some(prev) = spans.last().filter(|p: &&AnnotationSpan| start < p.start) {
            return Err(Error::parse(
                path,
                i + 1,
                format!("span starts at {start}, before the previous span at {}", prev.start),
            ));
        }
        spans.push(AnnotationSpan { start, end, label });
    }
    AnnotationSet::new(record_id, spans).map_err(|e| e.context(path.display().to_string()))
}

pub fn save_annotations(set: &AnnotationSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut body = String::new();
    for s in &set.spans {
        body.push_str(&format!("{} {} {}\n", s.start, s.end, s.label.as_u8()));
    }
    fs::write(path, body).map_err(|e| Error::io(path, e))
}
