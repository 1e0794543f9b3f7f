//! Cross-dataset matrix over three synthetic corpora with different noise
//! mixes and sampling rates, plus a held-out fourth.

use ecgsqa::experiment::{build_table, cross_matrix, render_text, CrossConfig, PipelineConfig, Report};
use ecgsqa::ml::ModelConfig;
use ecgsqa::synth::{build_corpus, CorpusSpec};

fn main() -> ecgsqa::Result<()> {
    let specs = [
        ("A", CorpusSpec { n_records: 16, fs: 360.0, ma_weight: 0.7, seed: 1, ..Default::default() }),
        ("B", CorpusSpec { n_records: 16, fs: 1000.0, ma_weight: 0.3, seed: 2, ..Default::default() }),
        ("C", CorpusSpec { n_records: 16, fs: 1024.0, ma_weight: 0.5, seed: 3, ..Default::default() }),
        ("H", CorpusSpec { n_records: 16, fs: 360.0, ma_weight: 0.3, seed: 4, ..Default::default() }),
    ];
    let mut tables = Vec::new();
    for (id, spec) in &specs {
        let recs: Vec<_> = build_corpus(id, spec)?.into_iter().map(|r| (r.record, r.annotations)).collect();
        tables.push(build_table(id, &recs, &PipelineConfig::default())?);
    }
    let cfg = CrossConfig { holdout: vec!["H".into()], ..Default::default() };
    let m = cross_matrix(&tables, &ModelConfig::default(), &cfg, 7)?;
    print!("{}", render_text(&Report::Cross(m)));
    Ok(())
}
