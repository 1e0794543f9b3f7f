//! Synthetic ECG, artifact noise, and noise-stress-test style mixing.
//!
//! The clean generator sums five Gaussian bumps (P, Q, R, S, T) per beat.
//! QRS timing is fixed relative to the R centre; P and T offsets and widths
//! scale with the square root of the preceding RR interval. The R bump is
//! centred exactly on a sample, which is the ground-truth peak index.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{AnnotationSet, AnnotationSpan, EcgRecord, Label};
use crate::preprocess::Bandpass;
use crate::rpeak::PeakList;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EcgSynthParams {
    pub duration_s: f64,
    pub fs: f64,
    pub mean_hr_bpm: f64,
    /// Standard deviation of RR as a percentage of the mean RR.
    pub rr_jitter_pct: f64,
    pub qrs_amplitude: f64,
    pub seed: u64,
}

impl Default for EcgSynthParams {
    fn default() -> Self {
        Self {
            duration_s: 60.0,
            fs: 360.0,
            mean_hr_bpm: 60.0,
            rr_jitter_pct: 0.0,
            qrs_amplitude: 1.0,
            seed: 0,
        }
    }
}

impl EcgSynthParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.duration_s > 0.0) {
            return Err(Error::InvalidParameter("duration_s must be > 0".into()));
        }
        if !(self.fs > 0.0) {
            return Err(Error::InvalidSamplingRate(self.fs));
        }
        if !(30.0..=220.0).contains(&self.mean_hr_bpm) {
            return Err(Error::InvalidParameter(format!(
                "mean_hr_bpm {} outside [30, 220]",
                self.mean_hr_bpm
            )));
        }
        if !(self.rr_jitter_pct >= 0.0) {
            return Err(Error::InvalidParameter("rr_jitter_pct must be >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct Wave {
    offset_s: f64,
    amplitude: f64,
    sigma_s: f64,
    scales_with_rr: bool,
}

const TEMPLATE: [Wave; 5] = [
    Wave { offset_s: -0.20, amplitude: 0.15, sigma_s: 0.025, scales_with_rr: true },
    Wave { offset_s: -0.035, amplitude: -0.15, sigma_s: 0.010, scales_with_rr: false },
    Wave { offset_s: 0.0, amplitude: 1.0, sigma_s: 0.010, scales_with_rr: false },
    Wave { offset_s: 0.035, amplitude: -0.25, sigma_s: 0.010, scales_with_rr: false },
    Wave { offset_s: 0.30, amplitude: 0.30, sigma_s: 0.060, scales_with_rr: true },
];

#[derive(Debug, Clone)]
pub struct SyntheticEcg {
    pub record: EcgRecord,
    pub peaks: PeakList,
    /// RR intervals as drawn, in seconds, including the one leading to the first beat.
    pub rr_draws_s: Vec<f64>,
}

pub fn synth_ecg(record_id: &str, p: &EcgSynthParams) -> Result<SyntheticEcg> {
    p.validate()?;
    let fs = p.fs;
    let n = (p.duration_s * fs).round() as usize;
    let mean_rr = 60.0 / p.mean_hr_bpm;
    let sigma = p.rr_jitter_pct / 100.0;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);

    let draw_rr = |rng: &mut ChaCha8Rng| {
        if sigma == 0.0 {
            return mean_rr;
        }
        let z: f64 = rng.sample(StandardNormal);
        mean_rr * (1.0 + (z * sigma).clamp(-3.0 * sigma, 3.0 * sigma))
    };

    let mut beats: Vec<(usize, f64)> = Vec::new();
    let mut rr_draws = Vec::new();
    let mut t = mean_rr / 2.0;
    let mut prev_rr = mean_rr;
    loop {
        let idx = (t * fs).round() as usize;
        if idx >= n {
            break;
        }
        beats.push((idx, prev_rr));
        let rr = draw_rr(&mut rng);
        rr_draws.push(rr);
        prev_rr = rr;
        t += rr;
    }

    let mut x = vec![0.0; n];
    for &(r_idx, rr) in &beats {
        let stretch = rr.sqrt();
        for w in &TEMPLATE {
            let k = if w.scales_with_rr { stretch } else { 1.0 };
            let centre = r_idx as f64 + w.offset_s * k * fs;
            let sd = w.sigma_s * k * fs;
            let amp = w.amplitude * p.qrs_amplitude;
            let lo = (centre - 5.0 * sd).floor().max(0.0) as usize;
            let hi = ((centre + 5.0 * sd).ceil().max(0.0) as usize).min(n.saturating_sub(1));
            for (j, v) in x.iter_mut().enumerate().take(hi + 1).skip(lo) {
                let d = (j as f64 - centre) / sd;
                *v += amp * (-0.5 * d * d).exp();
            }
        }
    }

    let peaks = PeakList::new(beats.iter().map(|b| b.0).collect(), fs)?;
    Ok(SyntheticEcg {
        record: EcgRecord::new(record_id, x, fs)?,
        peaks,
        rr_draws_s: rr_draws,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    MuscleArtifact,
    ElectrodeMotion,
    BaselineWander,
}

#[derive(Debug, Clone)]
pub struct NoiseSignal {
    pub samples: Vec<f64>,
    /// Electrode-motion step events `(index, jump)` after normalisation.
    pub steps: Vec<(usize, f64)>,
}

/// Mean number of electrode-motion steps per second.
pub const EM_STEP_RATE_HZ: f64 = 0.5;
const EM_STEP_SD: f64 = 0.05;
const EM_WALK_SD: f64 = 0.0003;
const EM_DRIFT_AMPLITUDE: f64 = 0.03;
/// Each step carries a QRS-width transient with amplitude in this range
/// and random polarity.
const EM_TRANSIENT_AMPLITUDE: [f64; 2] = [0.5, 1.5];
const EM_TRANSIENT_WIDTH_S: f64 = 0.02;

/// Mexican-hat pulse: a narrow positive lobe flanked by two negative ones.
fn ricker(t: f64, sigma: f64) -> f64 {
    let u = t / sigma;
    (1.0 - u * u) * (-0.5 * u * u).exp()
}

fn unit_variance(x: &mut [f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let sd = (x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt();
    let sd = if sd > 0.0 { sd } else { 1.0 };
    for v in x.iter_mut() {
        *v = (*v - mean) / sd;
    }
    sd
}

fn sinusoid_mixture(rng: &mut ChaCha8Rng, n: usize, fs: f64, components: usize, max_hz: f64) -> Vec<f64> {
    let parts: Vec<(f64, f64, f64)> = (0..components)
        .map(|_| {
            let f = rng.random_range(0.05..max_hz);
            let phase = rng.random_range(0.0..std::f64::consts::TAU);
            let amp = rng.random_range(0.5..1.0);
            (f, phase, amp)
        })
        .collect();
    (0..n)
        .map(|i| {
            let t = i as f64 / fs;
            parts
                .iter()
                .map(|(f, ph, a)| a * (std::f64::consts::TAU * f * t + ph).sin())
                .sum()
        })
        .collect()
}

pub fn synth_noise(kind: NoiseKind, duration_s: f64, fs: f64, seed: u64) -> Result<NoiseSignal> {
    if !(duration_s > 0.0) || !(fs > 0.0) {
        return Err(Error::InvalidParameter("noise duration and fs must be positive".into()));
    }
    let n = (duration_s * fs).round() as usize;
    if n < 2 {
        return Err(Error::InvalidParameter("noise must span at least 2 samples".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ kind_salt(kind));
    let mut steps = Vec::new();
    let mut x = match kind {
        NoiseKind::MuscleArtifact => {
            let white: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let band = Bandpass::design(4, 20.0, 0.9 * fs / 2.0, fs)?;
            band.filtfilt(&white)
        }
        NoiseKind::ElectrodeMotion => {
            let arrivals = Exp::new(EM_STEP_RATE_HZ).map_err(|e| Error::Invariant(e.to_string()))?;
            let jump = Normal::new(0.0, EM_STEP_SD).map_err(|e| Error::Invariant(e.to_string()))?;
            let mut at = Vec::new();
            let mut t = arrivals.sample(&mut rng);
            while t < duration_s {
                let idx = (t * fs) as usize;
                if idx > 0 && idx < n {
                    let j = jump.sample(&mut rng);
                    let a = rng.random_range(EM_TRANSIENT_AMPLITUDE[0]..EM_TRANSIENT_AMPLITUDE[1]);
                    let a = if rng.random_bool(0.5) { a } else { -a };
                    at.push((idx, j, a));
                }
                t += arrivals.sample(&mut rng);
            }
            let drift = sinusoid_mixture(&mut rng, n, fs, 3, 0.9);
            let mut level = 0.0;
            let mut walk = 0.0;
            let mut next = at.iter().peekable();
            let mut out = Vec::with_capacity(n);
            for (i, d) in drift.iter().enumerate() {
                while let Some(&&(idx, j, _)) = next.peek() {
                    if idx != i {
                        break;
                    }
                    level += j;
                    next.next();
                }
                walk += EM_WALK_SD * rng.sample::<f64, _>(StandardNormal);
                out.push(level + walk + EM_DRIFT_AMPLITUDE * d);
            }
            let sigma = EM_TRANSIENT_WIDTH_S * fs;
            let reach = (5.0 * sigma).ceil() as usize;
            for &(idx, _, a) in &at {
                for (k, v) in out.iter_mut().enumerate().take((idx + reach).min(n)).skip(idx.saturating_sub(reach)) {
                    *v += a * ricker(k as f64 - idx as f64, sigma);
                }
            }
            steps = at.iter().map(|&(i, j, _)| (i, j)).collect();
            out
        }
        NoiseKind::BaselineWander => sinusoid_mixture(&mut rng, n, fs, 4, 0.9),
    };
    let sd = unit_variance(&mut x);
    for s in &mut steps {
        s.1 /= sd;
    }
    Ok(NoiseSignal { samples: x, steps })
}

fn kind_salt(kind: NoiseKind) -> u64 {
    match kind {
        NoiseKind::MuscleArtifact => 0x4d41,
        NoiseKind::ElectrodeMotion => 0x454d,
        NoiseKind::BaselineWander => 0x4257,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NstSchedule {
    pub lead_in_s: f64,
    pub block_s: f64,
    pub snr_db: f64,
}

impl Default for NstSchedule {
    fn default() -> Self {
        Self {
            lead_in_s: 300.0,
            block_s: 120.0,
            snr_db: 0.0,
        }
    }
}

/// At or above this SNR the noise gain is taken as exactly zero.
pub const SNR_CLEAN_LIMIT_DB: f64 = 200.0;

/// Noise gain that puts `noise` at `snr_db` below a signal of power `ps`.
pub fn mixing_gain(ps: f64, pn: f64, snr_db: f64) -> f64 {
    if snr_db >= SNR_CLEAN_LIMIT_DB {
        return 0.0;
    }
    (ps / pn).sqrt() * 10f64.powf(-snr_db / 20.0)
}

pub(crate) fn variance(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedBlock {
    pub start: usize,
    pub end: usize,
    pub gain: f64,
}

#[derive(Debug, Clone)]
pub struct NstMix {
    pub record: EcgRecord,
    pub annotations: AnnotationSet,
    pub blocks: Vec<MixedBlock>,
}

/// Adds `noise` to `clean` in alternating blocks after a clean lead-in.
///
/// The first block after the lead-in is noisy. Each noisy block is scaled
/// so its variance sits `snr_db` below the clean variance over the same
/// block. A trailing partial block is used if it has at least two samples.
pub fn nst_mix(clean: &EcgRecord, noise: &[f64], schedule: &NstSchedule) -> Result<NstMix> {
    let fs = clean.fs();
    let n = clean.len();
    if noise.len() < n {
        return Err(Error::InvalidParameter(format!(
            "noise has {} samples, record has {n}",
            noise.len()
        )));
    }
    if !(schedule.lead_in_s >= 0.0) || !(schedule.block_s > 0.0) {
        return Err(Error::InvalidParameter("need lead_in_s >= 0 and block_s > 0".into()));
    }
    let lead = (schedule.lead_in_s * fs).round() as usize;
    let block = ((schedule.block_s * fs).round() as usize).max(1);
    if lead + block > n {
        return Err(Error::InvalidParameter(format!(
            "record of {n} samples cannot hold lead-in {lead} plus one block {block}"
        )));
    }

    let x = clean.samples();
    let mut out = x.to_vec();
    let mut spans = Vec::new();
    let mut blocks = Vec::new();
    let mut start = lead;
    let mut b = 0usize;
    while start < n {
        let end = (start + block).min(n);
        if b.is_multiple_of(2) && end - start >= 2 {
            let ps = variance(&x[start..end]);
            let pn = variance(&noise[start..end]);
            if !(ps > 0.0) || !(pn > 0.0) {
                return Err(Error::DegenerateSignal(format!(
                    "zero variance in block [{start}, {end})"
                )));
            }
            let g = mixing_gain(ps, pn, schedule.snr_db);
            for i in start..end {
                out[i] = x[i] + g * noise[i];
            }
            spans.push(AnnotationSpan::new(start, end, Label::Noisy)?);
            blocks.push(MixedBlock { start, end, gain: g });
        }
        start = end;
        b += 1;
    }

    Ok(NstMix {
        record: clean.map_samples(out)?,
        annotations: AnnotationSet::new(clean.record_id(), spans)?,
        blocks,
    })
}

/// How muscle and electrode-motion noise are combined per record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseMixing {
    /// Weighted sum of both kinds in every record.
    Joint,
    /// One kind per record, muscle artifact with probability `ma_weight`.
    PerRecord,
}

/// Recipe for a corpus of noise-stressed synthetic records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusSpec {
    pub n_records: usize,
    pub duration_s: f64,
    pub fs: f64,
    /// Heart rate drawn uniformly per record from `[lo, hi]`.
    pub hr_bpm: [f64; 2],
    pub jitter_pct: [f64; 2],
    /// Target SNRs, cycled over records.
    pub snr_db: Vec<f64>,
    /// Share of muscle-artifact power; the rest is electrode motion.
    pub ma_weight: f64,
    pub mixing: NoiseMixing,
    pub lead_in_s: f64,
    /// Noise block length drawn uniformly per record from `[lo, hi]`.
    pub block_s: [f64; 2],
    /// Leave every record clean.
    pub clean: bool,
    pub seed: u64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self {
            n_records: 10,
            duration_s: 300.0,
            fs: 360.0,
            hr_bpm: [55.0, 100.0],
            jitter_pct: [1.0, 5.0],
            snr_db: vec![0.0, -6.0],
            ma_weight: 0.5,
            mixing: NoiseMixing::Joint,
            lead_in_s: 30.0,
            block_s: [20.0, 20.0],
            clean: false,
            seed: 0,
        }
    }
}

impl CorpusSpec {
    pub fn validate(&self) -> Result<()> {
        let ordered = |r: [f64; 2]| r[0] <= r[1];
        if self.n_records == 0 {
            return Err(Error::InvalidParameter("n_records must be >= 1".into()));
        }
        if !ordered(self.hr_bpm) || !ordered(self.jitter_pct) || !ordered(self.block_s) {
            return Err(Error::InvalidParameter("ranges must be [lo, hi] with lo <= hi".into()));
        }
        if !(0.0..=1.0).contains(&self.ma_weight) {
            return Err(Error::InvalidParameter("ma_weight must be in [0, 1]".into()));
        }
        if !self.clean && self.snr_db.is_empty() {
            return Err(Error::InvalidParameter("snr_db must list at least one value".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct CorpusRecord {
    pub record: EcgRecord,
    pub annotations: AnnotationSet,
    pub peaks: PeakList,
}

fn uniform(rng: &mut ChaCha8Rng, r: [f64; 2]) -> f64 {
    if r[0] == r[1] {
        r[0]
    } else {
        rng.random_range(r[0]..r[1])
    }
}

/// Builds `spec.n_records` records named `<prefix>_<i>`. Records are
/// generated in parallel from per-record seeds.
pub fn build_corpus(prefix: &str, spec: &CorpusSpec) -> Result<Vec<CorpusRecord>> {
    use rayon::prelude::*;
    spec.validate()?;
    (0..spec.n_records)
        .into_par_iter()
        .map(|i| {
            let seed = crate::ml::forest::mix_seed(spec.seed, i as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let params = EcgSynthParams {
                duration_s: spec.duration_s,
                fs: spec.fs,
                mean_hr_bpm: uniform(&mut rng, spec.hr_bpm),
                rr_jitter_pct: uniform(&mut rng, spec.jitter_pct),
                qrs_amplitude: 1.0,
                seed: rng.random(),
            };
            let id = format!("{prefix}_{i:03}");
            let clean = synth_ecg(&id, &params)?;
            if spec.clean {
                return Ok(CorpusRecord {
                    annotations: AnnotationSet::all_clean(&id),
                    record: clean.record,
                    peaks: clean.peaks,
                });
            }
            let ma = synth_noise(NoiseKind::MuscleArtifact, spec.duration_s, spec.fs, rng.random())?;
            let em = synth_noise(NoiseKind::ElectrodeMotion, spec.duration_s, spec.fs, rng.random())?;
            let (wa, we) = match spec.mixing {
                NoiseMixing::Joint => (spec.ma_weight.sqrt(), (1.0 - spec.ma_weight).sqrt()),
                NoiseMixing::PerRecord => {
                    if rng.random_bool(spec.ma_weight) {
                        (1.0, 0.0)
                    } else {
                        (0.0, 1.0)
                    }
                }
            };
            let noise: Vec<f64> = ma.samples.iter().zip(&em.samples).map(|(a, e)| wa * a + we * e).collect();
            let schedule = NstSchedule {
                lead_in_s: spec.lead_in_s,
                block_s: uniform(&mut rng, spec.block_s),
                snr_db: spec.snr_db[i % spec.snr_db.len()],
            };
            let mix = nst_mix(&clean.record, &noise, &schedule)?;
            Ok(CorpusRecord {
                record: mix.record,
                annotations: mix.annotations,
                peaks: clean.peaks,
            })
        })
        .collect()
}
