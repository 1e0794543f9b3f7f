//! The nineteen time-domain features of a short RR series.

use ecgsqa::hrv::{compute_features, tinn, RrSeries, FEATURE_NAMES};

fn main() -> ecgsqa::Result<()> {
    let rr = RrSeries::new(vec![812.0, 790.0, 845.0, 830.0, 801.0, 779.0, 866.0, 842.0, 815.0, 798.0])?;
    let f = compute_features(&rr)?;
    for (name, v) in FEATURE_NAMES.iter().zip(f.to_array()) {
        println!("{name:>9}  {v:.4}");
    }
    let t = tinn(&rr)?;
    println!("triangle base bins [{}, {}]", t.n_edge, t.m_edge);
    Ok(())
}
