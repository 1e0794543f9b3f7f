//! Window-length sweep on a corpus with 15-25 s noise bursts.

use ecgsqa::experiment::{sweep_window, PipelineConfig, WithinConfig};
use ecgsqa::ml::ModelConfig;
use ecgsqa::synth::{build_corpus, CorpusSpec};

fn main() -> ecgsqa::Result<()> {
    let spec = CorpusSpec { n_records: 30, block_s: [15.0, 25.0], ma_weight: 0.4, seed: 12, ..Default::default() };
    let recs: Vec<_> = build_corpus("S", &spec)?.into_iter().map(|r| (r.record, r.annotations)).collect();
    let windows = [5.0, 10.0, 15.0, 20.0, 25.0, 30.0];
    let r = sweep_window("S", &recs, &PipelineConfig::default(), &windows, &ModelConfig::default(), &WithinConfig::default(), 3)?;
    print!("{}", r.to_csv());
    Ok(())
}
