//! Noise stress test: clean lead-in, then alternating noisy blocks at a
//! fixed SNR. Prints the SNR achieved in each noisy block.

use ecgsqa::synth::{nst_mix, synth_ecg, synth_noise, EcgSynthParams, NoiseKind, NstSchedule};

fn var(x: &[f64]) -> f64 {
    let m = x.iter().sum::<f64>() / x.len() as f64;
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / x.len() as f64
}

fn main() -> ecgsqa::Result<()> {
    let p = EcgSynthParams { duration_s: 300.0, mean_hr_bpm: 68.0, rr_jitter_pct: 3.0, seed: 5, ..Default::default() };
    let clean = synth_ecg("nst", &p)?;
    let noise = synth_noise(NoiseKind::ElectrodeMotion, p.duration_s, p.fs, 9)?;
    for snr in [0.0, -6.0] {
        let sched = NstSchedule { lead_in_s: 30.0, block_s: 20.0, snr_db: snr };
        let mix = nst_mix(&clean.record, &noise.samples, &sched)?;
        println!("target {snr} dB, {} noisy blocks", mix.blocks.len());
        for b in &mix.blocks {
            let s = &clean.record.samples()[b.start..b.end];
            let added: Vec<f64> = (b.start..b.end).map(|i| mix.record.samples()[i] - clean.record.samples()[i]).collect();
            println!("  [{:>6}, {:>6})  gain {:.4}  achieved {:+.4} dB", b.start, b.end, b.gain, 10.0 * (var(s) / var(&added)).log10());
        }
    }
    Ok(())
}
