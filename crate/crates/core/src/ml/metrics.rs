use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::Label;

/// Binary classification metrics with the noisy class as positive.
///
/// Precision, recall and F1 are per-class values averaged with support
/// weights. A class with no predictions has precision 0. `auprc` is `None`
/// when there are no positive samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub n_samples: usize,
    pub accuracy: f64,
    pub precision_weighted: f64,
    pub recall_weighted: f64,
    pub f1_weighted: f64,
    pub auprc: Option<f64>,
    /// Samples per true class, `[clean, noisy]`.
    pub support: [usize; 2],
    /// `[[tn, fp], [fn, tp]]`, rows are true labels.
    pub confusion: [[usize; 2]; 2],
}

pub fn confusion(y_true: &[Label], y_pred: &[Label]) -> [[usize; 2]; 2] {
    let mut m = [[0usize; 2]; 2];
    for (t, p) in y_true.iter().zip(y_pred) {
        m[t.as_u8() as usize][p.as_u8() as usize] += 1;
    }
    m
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Average precision over score-descending thresholds, equal scores grouped.
pub fn average_precision(y_true: &[Label], scores: &[f64]) -> Option<f64> {
    let positives = y_true.iter().filter(|&&l| l == Label::Noisy).count();
    if positives == 0 {
        return None;
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut prev_recall = 0.0;
    let mut ap = 0.0;
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            match y_true[order[i]] {
                Label::Noisy => tp += 1,
                Label::Clean => fp += 1,
            }
            i += 1;
        }
        let recall = tp as f64 / positives as f64;
        ap += (recall - prev_recall) * (tp as f64 / (tp + fp) as f64);
        prev_recall = recall;
    }
    Some(ap)
}

pub fn metrics(y_true: &[Label], y_pred: &[Label], scores: &[f64]) -> Result<MetricsReport> {
    if y_true.len() != y_pred.len() {
        return Err(Error::LengthMismatch(y_true.len(), y_pred.len()));
    }
    if y_true.len() != scores.len() {
        return Err(Error::LengthMismatch(y_true.len(), scores.len()));
    }
    if y_true.is_empty() {
        return Err(Error::Empty("no samples to score".into()));
    }
    if let Some(s) = scores.iter().find(|s| !(0.0..=1.0).contains(*s)) {
        return Err(Error::InvalidParameter(format!("score {s} outside [0, 1]")));
    }
    let n = y_true.len();
    let cm = confusion(y_true, y_pred);
    let support = [cm[0][0] + cm[0][1], cm[1][0] + cm[1][1]];
    let predicted = [cm[0][0] + cm[1][0], cm[0][1] + cm[1][1]];

    let mut p_w = 0.0;
    let mut r_w = 0.0;
    let mut f_w = 0.0;
    for c in 0..2 {
        let p = ratio(cm[c][c], predicted[c]);
        let r = ratio(cm[c][c], support[c]);
        let f = if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
        let w = support[c] as f64 / n as f64;
        p_w += w * p;
        r_w += w * r;
        f_w += w * f;
    }

    Ok(MetricsReport {
        n_samples: n,
        accuracy: (cm[0][0] + cm[1][1]) as f64 / n as f64,
        precision_weighted: p_w,
        recall_weighted: r_w,
        f1_weighted: f_w,
        auprc: average_precision(y_true, scores),
        support,
        confusion: cm,
    })
}

/// Field-wise arithmetic mean. Counts are summed; `auprc` averages the
/// defined entries and stays `None` only if every input lacks it.
pub fn mean_report(reports: &[MetricsReport]) -> Result<MetricsReport> {
    if reports.is_empty() {
        return Err(Error::Empty("no reports to average".into()));
    }
    let k = reports.len() as f64;
    let avg = |f: fn(&MetricsReport) -> f64| reports.iter().map(f).sum::<f64>() / k;
    let defined: Vec<f64> = reports.iter().filter_map(|r| r.auprc).collect();
    let mut support = [0; 2];
    let mut cm = [[0; 2]; 2];
    for r in reports {
        for c in 0..2 {
            support[c] += r.support[c];
            for (acc, v) in cm[c].iter_mut().zip(r.confusion[c]) {
                *acc += v;
            }
        }
    }
    Ok(MetricsReport {
        n_samples: reports.iter().map(|r| r.n_samples).sum(),
        accuracy: avg(|r| r.accuracy),
        precision_weighted: avg(|r| r.precision_weighted),
        recall_weighted: avg(|r| r.recall_weighted),
        f1_weighted: avg(|r| r.f1_weighted),
        auprc: if defined.is_empty() {
            None
        } else {
            Some(defined.iter().sum::<f64>() / defined.len() as f64)
        },
        support,
        confusion: cm,
    })
}
