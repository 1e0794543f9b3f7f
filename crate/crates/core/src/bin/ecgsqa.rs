use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ecgsqa::experiment::{self, report, RunConfig};
use ecgsqa::io::{self, AnnotationSet, EcgRecord};
use ecgsqa::synth::{self, CorpusSpec, NoiseKind, NstSchedule};
use ecgsqa::{Error, ErrorClass, Result};

/// ECG signal quality assessment from time-domain HRV features.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    /// Seed for folds, models and synthesis; overrides the config file.
    #[arg(long, global = true, env = "ECGSQA_SEED")]
    seed: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Convert a plain sample file into a record (.ecg + .meta, optional .ann).
    Ingest(IngestArgs),
    /// Generate a synthetic noise-stressed corpus.
    Synth(SynthArgs),
    /// Mix noise into a clean record in alternating blocks.
    Nst(NstArgs),
    /// Extract feature tables for every dataset in a config.
    Pipeline(ConfigArgs),
    /// Stratified k-fold evaluation inside each dataset.
    Within(WithinArgs),
    /// Pairwise, combined and holdout cross-dataset evaluation.
    Cross(ConfigArgs),
    /// Repeat the within-dataset evaluation over window lengths.
    SweepWindow(SweepArgs),
    /// Print saved reports as tables.
    Report(ReportArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// Run configuration (TOML).
    #[arg(long, short)]
    config: PathBuf,
    /// Override the configured output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WithinArgs {
    #[command(flatten)]
    base: ConfigArgs,
    /// Only this dataset.
    #[arg(long)]
    dataset: Option<String>,
    /// Pool predictions over folds instead of averaging fold metrics.
    #[arg(long)]
    pooled: bool,
    /// Keep all windows of a record in the same fold.
    #[arg(long)]
    group_by_record: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    base: ConfigArgs,
    #[arg(long)]
    dataset: Option<String>,
    /// Window lengths in seconds, comma separated.
    #[arg(long, value_delimiter = ',')]
    windows: Option<Vec<f64>>,
}

#[derive(Args)]
struct IngestArgs {
    /// Text file with one sample per line, or an existing .ecg record.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    fs: Option<f64>,
    #[arg(long)]
    id: Option<String>,
    /// Zero-based column to read when lines hold several values.
    #[arg(long, default_value_t = 0)]
    column: usize,
    #[arg(long, default_value = "mV")]
    units: String,
    #[arg(long, default_value = "ECG")]
    channel: String,
    /// Annotation file (`start end label` per line).
    #[arg(long)]
    ann: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    /// Corpus recipe (TOML); flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "synth")]
    id: String,
    #[arg(long)]
    n_records: Option<usize>,
    #[arg(long)]
    duration: Option<f64>,
    #[arg(long)]
    fs: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    snr: Option<Vec<f64>>,
    #[arg(long)]
    ma_weight: Option<f64>,
    #[arg(long)]
    lead_in: Option<f64>,
    #[arg(long)]
    block: Option<f64>,
    /// Leave every record clean.
    #[arg(long)]
    clean: bool,
}

#[derive(Args)]
struct NstArgs {
    /// Clean record (.ecg with .meta sidecar).
    #[arg(long)]
    clean: PathBuf,
    /// `ma`, `em`, `bw`, or a path to a noise record.
    #[arg(long)]
    noise: String,
    #[arg(long, allow_hyphen_values = true)]
    snr: f64,
    #[arg(long, default_value_t = 300.0)]
    lead_in: f64,
    #[arg(long, default_value_t = 120.0)]
    block: f64,
    #[arg(long)]
    id: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Print raw JSON instead of a table.
    #[arg(long)]
    json: bool,
}

fn load_config(a: &ConfigArgs, seed: Option<u64>) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(&a.config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(o) = &a.out {
        cfg.output_dir = o.clone();
    }
    Ok(cfg)
}

fn mkdir(p: &Path) -> Result<()> {
    std::fs::create_dir_all(p).map_err(|e| Error::io(p, e))
}

fn write_triple(dir: &Path, rec: &EcgRecord, ann: &AnnotationSet) -> Result<()> {
    let id = rec.record_id();
    io::save_record(rec, dir.join(format!("{id}.ecg")))?;
    io::save_annotations(ann, dir.join(format!("{id}.ann")))
}

fn read_column(path: &Path, column: usize) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let field = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .nth(column)
            .ok_or_else(|| Error::parse(path, n + 1, format!("no column {column}")))?;
        let v: f64 = field
            .parse()
            .map_err(|_| Error::parse(path, n + 1, format!("not a number: {field:?}")))?;
        out.push(v);
    }
    Ok(out)
}

fn ingest(a: &IngestArgs) -> Result<()> {
    let is_record = a.input.extension().is_some_and(|x| x == "ecg") && a.fs.is_none();
    let mut rec = if is_record {
        io::load_record(&a.input)?
    } else {
        let fs = a.fs.ok_or_else(|| Error::Config("--fs is required for plain sample files".into()))?;
        let id = a.id.clone().unwrap_or_else(|| {
            a.input.file_stem().map_or("record".into(), |s| s.to_string_lossy().into_owned())
        });
        EcgRecord::new(id, read_column(&a.input, a.column)?, fs)
            .map_err(|e| e.context(a.input.display().to_string()))?
            .with_units(a.units.clone())
            .with_channel(a.channel.clone())
    };
    if let Some(id) = &a.id {
        rec = EcgRecord::new(id.clone(), rec.samples().to_vec(), rec.fs())?
            .with_units(rec.units().to_string())
            .with_channel(rec.channel().to_string());
    }
    let ann = match &a.ann {
        Some(p) => {
            let set = io::load_annotations(p)?;
            set.check_bounds(rec.len()).map_err(|e| e.context(p.display().to_string()))?;
            AnnotationSet::new(rec.record_id(), set.spans().to_vec())?
        }
        None => AnnotationSet::all_clean(rec.record_id()),
    };
    mkdir(&a.out)?;
    write_triple(&a.out, &rec, &ann)?;
    println!(
        "{}: {} samples at {} Hz, {} noisy span(s)",
        rec.record_id(),
        rec.len(),
        rec.fs(),
        ann.spans().len()
    );
    Ok(())
}

fn synth_cmd(a: &SynthArgs, seed: Option<u64>) -> Result<()> {
    let mut spec: CorpusSpec = match &a.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?
        }
        None => CorpusSpec::default(),
    };
    if let Some(v) = a.n_records {
        spec.n_records = v;
    }
    if let Some(v) = a.duration {
        spec.duration_s = v;
    }
    if let Some(v) = a.fs {
        spec.fs = v;
    }
    if let Some(v) = &a.snr {
        spec.snr_db = v.clone();
    }
    if let Some(v) = a.ma_weight {
        spec.ma_weight = v;
    }
    if let Some(v) = a.lead_in {
        spec.lead_in_s = v;
    }
    if let Some(v) = a.block {
        spec.block_s = [v, v];
    }
    if let Some(s) = seed {
        spec.seed = s;
    }
    spec.clean |= a.clean;
    spec.validate().map_err(|e| Error::Config(e.to_string()))?;
    let corpus = synth::build_corpus(&a.id, &spec)?;
    mkdir(&a.out)?;
    for r in &corpus {
        write_triple(&a.out, &r.record, &r.annotations)?;
        let p = a.out.join(format!("{}.peaks", r.record.record_id()));
        std::fs::write(&p, r.peaks.to_text()).map_err(|e| Error::io(p, e))?;
    }
    println!("wrote {} records to {}", corpus.len(), a.out.display());
    Ok(())
}

fn nst_cmd(a: &NstArgs, seed: Option<u64>) -> Result<()> {
    let clean = io::load_record(&a.clean)?;
    let kind = match a.noise.as_str() {
        "ma" => Some(NoiseKind::MuscleArtifact),
        "em" => Some(NoiseKind::ElectrodeMotion),
        "bw" => Some(NoiseKind::BaselineWander),
        _ => None,
    };
    let noise = match kind {
        Some(k) => synth::synth_noise(k, clean.duration_s(), clean.fs(), seed.unwrap_or(0))?.samples,
        None => io::load_record(&a.noise)?.into_samples(),
    };
    let sched = NstSchedule {
        lead_in_s: a.lead_in,
        block_s: a.block,
        snr_db: a.snr,
    };
    let mix = synth::nst_mix(&clean, &noise, &sched)?;
    let id = a.id.clone().unwrap_or_else(|| format!("{}_{}dB", clean.record_id(), a.snr));
    let rec = EcgRecord::new(id.clone(), mix.record.into_samples(), clean.fs())?
        .with_units(clean.units().to_string())
        .with_channel(clean.channel().to_string());
    let ann = AnnotationSet::new(id, mix.annotations.spans().to_vec())?;
    mkdir(&a.out)?;
    write_triple(&a.out, &rec, &ann)?;
    for b in &mix.blocks {
        println!("noisy [{}, {}) gain {:.6}", b.start, b.end, b.gain);
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let seed = cli.seed;
    match cli.cmd {
        Cmd::Ingest(a) => ingest(&a),
        Cmd::Synth(a) => synth_cmd(&a, seed),
        Cmd::Nst(a) => nst_cmd(&a, seed),
        Cmd::Pipeline(a) => {
            let cfg = load_config(&a, seed)?;
            let (_, summary) = experiment::cmd_pipeline(&cfg)?;
            print!("{}", experiment::format_summary(&summary));
            Ok(())
        }
        Cmd::Within(a) => {
            let mut cfg = load_config(&a.base, seed)?;
            if a.pooled {
                cfg.within.aggregation = experiment::Aggregation::Pooled;
            }
            cfg.within.group_by_record |= a.group_by_record;
            for r in experiment::cmd_within(&cfg, a.dataset.as_deref())? {
                print!("{}", report::render_text(&experiment::Report::Within(r)));
            }
            Ok(())
        }
        Cmd::Cross(a) => {
            let cfg = load_config(&a, seed)?;
            let m = experiment::cmd_cross(&cfg)?;
            print!("{}", report::render_text(&experiment::Report::Cross(m)));
            Ok(())
        }
        Cmd::SweepWindow(a) => {
            let cfg = load_config(&a.base, seed)?;
            let r = experiment::cmd_sweep_window(&cfg, a.dataset.as_deref(), a.windows.as_deref())?;
            print!("{}", report::render_text(&experiment::Report::Sweep(r)));
            Ok(())
        }
        Cmd::Report(a) => {
            for f in &a.files {
                let r = report::load_report(f)?;
                if a.json {
                    print!("{}", report::report_to_json(&r)?);
                } else {
                    println!("{}", f.display());
                    print!("{}", report::render_text(&r));
                }
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.class() {
                ErrorClass::Usage => 1,
                ErrorClass::Data => 2,
                ErrorClass::Internal => 3,
            })
        }
        Err(_) => ExitCode::from(3),
    }
}
