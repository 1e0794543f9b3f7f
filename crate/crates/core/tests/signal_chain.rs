mod common;

use common::{rms, rng, sine};
use ecgsqa::io::{AnnotationSet, AnnotationSpan, EcgRecord, Label};
use ecgsqa::preprocess::{condition, label_window, segment, Bandpass, FilterConfig, SegmentationConfig};
use ecgsqa::rpeak::{correct_rpeaks, detect_rpeaks, segment_rpeaks, DetectorConfig, PeakList};
use ecgsqa::synth::{nst_mix, synth_ecg, synth_noise, EcgSynthParams, NoiseKind, NstSchedule};
use proptest::prelude::*;
use rand::Rng;

/// Squared magnitude of an ideal digital Butterworth bandpass (bilinear,
/// prewarped edges), evaluated from the textbook transfer function.
fn butterworth_sq(order: usize, lo: f64, hi: f64, fs: f64, f: f64) -> f64 {
    let warp = |f: f64| 2.0 * fs * (std::f64::consts::PI * f / fs).tan();
    let (w1, w2, w) = (warp(lo), warp(hi), warp(f));
    let omega = (w * w - w1 * w2) / (w * (w2 - w1));
    1.0 / (1.0 + omega.abs().powi(2 * order as i32))
}

fn measured_gain(band: &Bandpass, f: f64) -> f64 {
    let fs = band.fs();
    let x = sine(f, fs, 60.0);
    let y = band.filtfilt(&x);
    let mid = x.len() / 4..3 * x.len() / 4;
    rms(&y[mid.clone()]) / rms(&x[mid])
}

#[test]
fn filter_gain_follows_squared_butterworth() {
    let cfg = FilterConfig::default();
    for fs in [360.0, 1000.0, 1024.0] {
        let band = Bandpass::design(cfg.order, cfg.low_hz, cfg.high_hz, fs).unwrap();
        for f in [5.0, 10.0, 20.0, 30.0] {
            let want = butterworth_sq(cfg.order, cfg.low_hz, cfg.high_hz, fs, f);
            let got = measured_gain(&band, f);
            assert!((got / want - 1.0).abs() < 0.01, "fs {fs}, {f} Hz: {got} vs {want}");
        }
        for f in [0.3, 50.0] {
            let db = 20.0 * measured_gain(&band, f).log10();
            assert!(db <= -20.0, "fs {fs}, {f} Hz: {db} dB");
        }
    }
}

#[test]
fn sections_match_closed_form_magnitude() {
    let band = Bandpass::design(4, 3.0, 45.0, 360.0).unwrap();
    for f in [1.0, 3.0, 10.0, 45.0, 100.0] {
        let want = butterworth_sq(4, 3.0, 45.0, 360.0, f).sqrt();
        assert!((band.magnitude(f) - want).abs() < 1e-9, "{f} Hz");
    }
    assert!((band.magnitude(3.0) - 0.5f64.sqrt()).abs() < 1e-9);
}

#[test]
fn filter_design_rejects_bad_bands() {
    assert!(Bandpass::design(4, 45.0, 3.0, 360.0).is_err());
    assert!(Bandpass::design(4, 3.0, 180.0, 360.0).is_err());
    assert!(Bandpass::design(0, 3.0, 45.0, 360.0).is_err());
}

#[test]
fn forward_backward_filter_has_zero_lag() {
    let s = synth_ecg("lag", &EcgSynthParams { duration_s: 60.0, rr_jitter_pct: 3.0, seed: 4, ..Default::default() }).unwrap();
    let x = s.record.samples();
    let cfg = FilterConfig::default();
    let y = Bandpass::design(cfg.order, cfg.low_hz, cfg.high_hz, 360.0).unwrap().filtfilt(x);
    let xc = |lag: i64| -> f64 {
        (1000..x.len() - 1000).map(|i| x[i] * y[(i as i64 + lag) as usize]).sum()
    };
    let best = (-50..=50).max_by(|&a, &b| xc(a).total_cmp(&xc(b))).unwrap();
    assert_eq!(best, 0);
}

/// Greedy one-to-one matching within `tol` samples; returns true positives.
fn matched(truth: &[usize], found: &[usize], tol: usize) -> usize {
    let mut used = vec![false; found.len()];
    let mut tp = 0;
    for &t in truth {
        if let Some(j) = (0..found.len()).find(|&j| !used[j] && found[j].abs_diff(t) <= tol) {
            used[j] = true;
            tp += 1;
        }
    }
    tp
}

fn detect(record: &EcgRecord) -> PeakList {
    let c = condition(record, &FilterConfig::default()).unwrap();
    segment_rpeaks(c.samples(), c.fs(), &DetectorConfig::default()).unwrap()
}

#[test]
fn detector_finds_synthetic_beats() {
    let mut r = rng(41);
    for (i, fs) in [360.0, 1000.0, 1024.0].into_iter().enumerate() {
        let p = EcgSynthParams {
            duration_s: 120.0,
            fs,
            mean_hr_bpm: r.random_range(50.0..120.0),
            rr_jitter_pct: r.random_range(0.0..5.0),
            seed: i as u64,
            ..Default::default()
        };
        let s = synth_ecg("d", &p).unwrap();
        let found = detect(&s.record);
        let tp = matched(s.peaks.indices(), found.indices(), (0.02 * fs) as usize);
        assert!(tp as f64 >= 0.99 * s.peaks.len() as f64, "fs {fs}: {tp}/{}", s.peaks.len());
        assert!(tp as f64 >= 0.99 * found.len() as f64, "fs {fs}: {tp}/{}", found.len());
    }
}

#[test]
fn searchback_skips_dropout() {
    let fs = 360.0;
    let s = synth_ecg("drop", &EcgSynthParams { duration_s: 60.0, mean_hr_bpm: 100.0, seed: 2, ..Default::default() }).unwrap();
    let truth = s.peaks.indices();
    let k = truth.len() / 2;
    let lo = truth[k] + (0.35 * fs) as usize;
    let hi = lo + (2.0 * fs) as usize;
    let inside = truth.iter().filter(|&&t| t >= lo && t < hi).count();
    assert_eq!(inside, 3);
    let mut x = s.record.samples().to_vec();
    x[lo..hi].iter_mut().for_each(|v| *v = 0.0);
    let found = detect(&s.record.map_samples(x).unwrap());
    assert!(found.indices().iter().all(|&p| p < lo || p >= hi), "peak inside the dropout");
    assert_eq!(found.len(), truth.len() - inside);
    assert_eq!(matched(truth, found.indices(), 7), found.len());
}

#[test]
fn detector_is_scale_invariant() {
    let s = synth_ecg("s", &EcgSynthParams { duration_s: 60.0, rr_jitter_pct: 4.0, seed: 9, ..Default::default() }).unwrap();
    let x = s.record.samples();
    let cfg = DetectorConfig::default();
    let base = detect_rpeaks(x, 360.0, &cfg).unwrap();
    for a in [0.25, 2.0, 1024.0, 1e-3] {
        let y: Vec<f64> = x.iter().map(|v| v * a).collect();
        assert_eq!(detect_rpeaks(&y, 360.0, &cfg).unwrap(), base, "scale {a}");
    }
}

#[test]
fn muscle_noise_has_little_low_frequency_power() {
    let fs = 360.0;
    let n = synth_noise(NoiseKind::MuscleArtifact, 60.0, fs, 5).unwrap().samples;
    let total: f64 = n.iter().map(|v| v * v).sum::<f64>() * n.len() as f64;
    // direct DFT over the bins below 10 Hz; Parseval gives the total
    let kmax = (10.0 * n.len() as f64 / fs) as usize;
    let low: f64 = (0..kmax)
        .map(|k| {
            let w = std::f64::consts::TAU * k as f64 / n.len() as f64;
            let (re, im) = n.iter().enumerate().fold((0.0, 0.0), |(re, im), (i, v)| {
                (re + v * (w * i as f64).cos(), im - v * (w * i as f64).sin())
            });
            let both_sides = if k == 0 { 1.0 } else { 2.0 };
            both_sides * (re * re + im * im)
        })
        .sum();
    assert!(low / total < 0.05, "share below 10 Hz {}", low / total);
}

#[test]
fn noise_is_unit_variance_and_seeded() {
    for kind in [NoiseKind::MuscleArtifact, NoiseKind::ElectrodeMotion, NoiseKind::BaselineWander] {
        let a = synth_noise(kind, 30.0, 1000.0, 3).unwrap().samples;
        let m = a.iter().sum::<f64>() / a.len() as f64;
        let v = a.iter().map(|x| (x - m).powi(2)).sum::<f64>() / a.len() as f64;
        assert!((v - 1.0).abs() < 1e-9, "{kind:?}: {v}");
        assert_eq!(a, synth_noise(kind, 30.0, 1000.0, 3).unwrap().samples);
        assert_ne!(a, synth_noise(kind, 30.0, 1000.0, 4).unwrap().samples);
    }
}

fn var(x: &[f64]) -> f64 {
    let m = x.iter().sum::<f64>() / x.len() as f64;
    x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / x.len() as f64
}

/// Noisy blocks of the schedule, computed independently of the mixer.
fn scheduled_blocks(n: usize, fs: f64, s: &NstSchedule) -> Vec<(usize, usize)> {
    let lead = (s.lead_in_s * fs).round() as usize;
    let block = (s.block_s * fs).round() as usize;
    let mut out = Vec::new();
    let mut start = lead;
    while start + 2 <= n {
        out.push((start, (start + block).min(n)));
        start += 2 * block;
    }
    out
}

#[test]
fn nst_blocks_hit_target_snr() {
    for (seed, snr) in [(1u64, 0.0), (2, -6.0), (3, 6.0)] {
        let s = synth_ecg("n", &EcgSynthParams { duration_s: 300.0, mean_hr_bpm: 75.0, rr_jitter_pct: 3.0, seed, ..Default::default() }).unwrap();
        let noise = synth_noise(NoiseKind::ElectrodeMotion, 300.0, 360.0, seed).unwrap().samples;
        let sched = NstSchedule { lead_in_s: 30.0, block_s: 20.0, snr_db: snr };
        let mix = nst_mix(&s.record, &noise, &sched).unwrap();
        let (x, y) = (s.record.samples(), mix.record.samples());
        let blocks = scheduled_blocks(x.len(), 360.0, &sched);
        assert_eq!(mix.blocks.len(), blocks.len());
        for &(a, b) in &blocks {
            let added: Vec<f64> = (a..b).map(|i| y[i] - x[i]).collect();
            let achieved = 10.0 * (var(&x[a..b]) / var(&added)).log10();
            assert!((achieved - snr).abs() <= 0.1, "[{a}, {b}): {achieved} dB");
        }
        for i in 0..x.len() {
            if !blocks.iter().any(|&(a, b)| i >= a && i < b) {
                assert_eq!(x[i].to_bits(), y[i].to_bits(), "sample {i} changed");
            }
        }
        let spans: Vec<(usize, usize)> = mix.annotations.spans().iter().map(|s| (s.start, s.end)).collect();
        assert_eq!(spans, blocks);
    }
}

#[test]
fn nst_partial_last_block() {
    let s = synth_ecg("p", &EcgSynthParams { duration_s: 50.0, seed: 1, ..Default::default() }).unwrap();
    let noise = synth_noise(NoiseKind::MuscleArtifact, 50.0, 360.0, 1).unwrap().samples;
    let mix = nst_mix(&s.record, &noise, &NstSchedule { lead_in_s: 10.0, block_s: 15.0, snr_db: 0.0 }).unwrap();
    let spans: Vec<(usize, usize)> = mix.annotations.spans().iter().map(|s| (s.start, s.end)).collect();
    assert_eq!(spans, vec![(3600, 9000), (14400, 18000)]);
    let short = &noise[..100];
    assert!(nst_mix(&s.record, short, &NstSchedule::default()).is_err());
}

fn oracle_label(blocks: &[(usize, usize)], start: usize, w: usize, thr: f64) -> Label {
    let noisy: usize = blocks
        .iter()
        .map(|&(a, b)| b.min(start + w).saturating_sub(a.max(start)))
        .sum();
    if noisy as f64 >= thr * w as f64 {
        Label::Noisy
    } else {
        Label::Clean
    }
}

#[test]
fn annotations_reproduce_window_labels() {
    let fs = 360.0;
    let s = synth_ecg("w", &EcgSynthParams { duration_s: 300.0, seed: 6, ..Default::default() }).unwrap();
    let noise = synth_noise(NoiseKind::MuscleArtifact, 300.0, fs, 6).unwrap().samples;
    for block_s in [15.0, 20.0, 25.0] {
        let sched = NstSchedule { lead_in_s: 30.0, block_s, snr_db: -6.0 };
        let mix = nst_mix(&s.record, &noise, &sched).unwrap();
        let blocks = scheduled_blocks(s.record.len(), fs, &sched);
        for window_seconds in [5.0, 10.0, 15.0, 20.0, 25.0, 30.0] {
            let cfg = SegmentationConfig { window_seconds, ..Default::default() };
            let seg = segment(&mix.record, &mix.annotations, &cfg).unwrap();
            let w = cfg.window_len(fs);
            assert!(!seg.segments.is_empty());
            for win in &seg.segments {
                assert_eq!(win.label, oracle_label(&blocks, win.start_index, w, 0.5));
            }
        }
    }
}

#[test]
fn fully_noisy_minute_gives_five_noisy_windows() {
    let n = 60 * 360;
    let r = EcgRecord::new("r", (0..n).map(|i| (i as f64 * 0.1).sin()).collect(), 360.0).unwrap();
    let ann = AnnotationSet::new("r", vec![AnnotationSpan::new(0, n, Label::Noisy).unwrap()]).unwrap();
    let seg = segment(&r, &ann, &SegmentationConfig::default()).unwrap();
    assert_eq!(seg.segments.len(), 5);
    assert!(seg.segments.iter().all(|s| s.label == Label::Noisy));
    let clean = segment(&r, &AnnotationSet::all_clean("r"), &SegmentationConfig::default()).unwrap();
    assert!(clean.segments.iter().all(|s| s.label == Label::Clean));
}

#[test]
fn short_record_has_no_windows() {
    let r = EcgRecord::new("r", vec![0.0; 3000], 360.0).unwrap();
    let seg = segment(&r, &AnnotationSet::all_clean("r"), &SegmentationConfig::default()).unwrap();
    assert!(seg.short_record && seg.segments.is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn window_labels_follow_overlap(
        spans in prop::collection::vec((0usize..400, 1usize..200), 0..6),
        start in 0usize..2000,
        w in 1usize..600,
        thr in 0.05f64..1.0,
    ) {
        // lay the spans end to end so they cannot overlap
        let mut at = 0;
        let mut blocks = Vec::new();
        for (gap, len) in spans {
            blocks.push((at + gap, at + gap + len));
            at += gap + len;
        }
        let set = AnnotationSet::new(
            "r",
            blocks.iter().map(|&(a, b)| AnnotationSpan::new(a, b, Label::Noisy).unwrap()).collect(),
        ).unwrap();
        prop_assert_eq!(label_window(&set, start, w, thr), oracle_label(&blocks, start, w, thr));
    }

    #[test]
    fn correction_is_idempotent(seed in any::<u64>(), k in 1usize..40) {
        let mut r = rng(seed);
        let x: Vec<f64> = (0..2000).map(|_| r.random_range(-1.0..1.0)).collect();
        let mut idx: Vec<usize> = (0..k).map(|_| r.random_range(0..2000)).collect();
        idx.sort_unstable();
        idx.dedup();
        let p = PeakList::new(idx, 360.0).unwrap();
        let once = correct_rpeaks(&x, &p, 0.05);
        prop_assert_eq!(correct_rpeaks(&x, &once, 0.05), once.clone());
        for &i in once.indices() {
            let lo = i.saturating_sub(18);
            let hi = (i + 19).min(x.len());
            prop_assert!(x[lo..hi].iter().all(|&v| v <= x[i]));
        }
    }

    #[test]
    fn detection_scale_invariance_on_random_records(seed in 0u64..1000, a in 0.01f64..100.0) {
        let s = synth_ecg("q", &EcgSynthParams { duration_s: 20.0, rr_jitter_pct: 5.0, seed, ..Default::default() }).unwrap();
        let x = s.record.samples();
        let y: Vec<f64> = x.iter().map(|v| v * a).collect();
        let cfg = DetectorConfig::default();
        prop_assert_eq!(detect_rpeaks(&y, 360.0, &cfg).unwrap(), detect_rpeaks(x, 360.0, &cfg).unwrap());
    }
}
