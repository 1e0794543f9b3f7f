//! Detect R-peaks on a synthetic record and score them against the
//! generator's ground truth.

use ecgsqa::preprocess::{condition, FilterConfig};
use ecgsqa::rpeak::{segment_rpeaks, DetectorConfig};
use ecgsqa::synth::{synth_ecg, EcgSynthParams};

fn main() -> ecgsqa::Result<()> {
    let params = EcgSynthParams {
        duration_s: 120.0,
        fs: 1000.0,
        mean_hr_bpm: 72.0,
        rr_jitter_pct: 4.0,
        seed: 3,
        ..Default::default()
    };
    let s = synth_ecg("demo", &params)?;
    let cond = condition(&s.record, &FilterConfig::default())?;
    let found = segment_rpeaks(cond.samples(), cond.fs(), &DetectorConfig::default())?;

    let tol = (0.02 * params.fs) as i64;
    let hit = |a: &[usize], b: usize| a.iter().any(|&x| (x as i64 - b as i64).abs() <= tol);
    let tp = s.peaks.indices().iter().filter(|&&t| hit(found.indices(), t)).count();
    let fp = found.indices().iter().filter(|&&d| !hit(s.peaks.indices(), d)).count();
    println!("truth {}  detected {}  tp {tp}  fp {fp}", s.peaks.len(), found.len());
    println!("sensitivity {:.4}  ppv {:.4}", tp as f64 / s.peaks.len() as f64, tp as f64 / (tp + fp) as f64);
    Ok(())
}
