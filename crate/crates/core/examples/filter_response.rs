//! Zero-phase bandpass response at a few probe frequencies.
//!
//!     cargo run --release --example filter_response -- 360

use ecgsqa::preprocess::{Bandpass, FilterConfig};

fn main() -> ecgsqa::Result<()> {
    let fs: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(360.0);
    let cfg = FilterConfig::default();
    let band = Bandpass::design(cfg.order, cfg.low_hz, cfg.high_hz, fs)?;
    println!("order {} bandpass {}-{} Hz at fs {fs} Hz", cfg.order, cfg.low_hz, cfg.high_hz);
    println!("moving average: {} samples", cfg.ma_window_len(fs));
    println!("{:>8} {:>12} {:>12} {:>10}", "f (Hz)", "|H|^2 ideal", "measured", "dB");

    // measure on a 60 s sinusoid, away from the edges
    let n = (60.0 * fs) as usize;
    for f in [0.3, 1.0, 3.0, 10.0, 20.0, 45.0, 50.0, 60.0] {
        let x: Vec<f64> = (0..n).map(|i| (std::f64::consts::TAU * f * i as f64 / fs).sin()).collect();
        let y = band.filtfilt(&x);
        let mid = n / 4..3 * n / 4;
        let rms = |v: &[f64]| (v.iter().map(|a| a * a).sum::<f64>() / v.len() as f64).sqrt();
        let gain = rms(&y[mid.clone()]) / rms(&x[mid]);
        let ideal = band.analytic_magnitude(f).powi(2);
        println!("{f:>8.1} {ideal:>12.6} {gain:>12.6} {:>10.2}", 20.0 * gain.log10());
    }
    Ok(())
}
