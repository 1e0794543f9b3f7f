//! Stratified 5-fold evaluation of each classifier on one synthetic corpus.

use ecgsqa::experiment::{build_table, report, within_eval, PipelineConfig, WithinConfig};
use ecgsqa::ml::{ModelConfig, ModelKind};
use ecgsqa::synth::{build_corpus, CorpusSpec};

fn main() -> ecgsqa::Result<()> {
    let spec = CorpusSpec { n_records: 40, ma_weight: 0.5, seed: 8, ..Default::default() };
    let recs: Vec<_> = build_corpus("W", &spec)?.into_iter().map(|r| (r.record, r.annotations)).collect();
    let table = build_table("W", &recs, &PipelineConfig::default())?;

    let mut reports = Vec::new();
    for kind in [ModelKind::Logreg, ModelKind::Dtree, ModelKind::Rforest] {
        let r = within_eval(&table, &ModelConfig::default_for(kind), &WithinConfig::default(), 42)?;
        reports.push((kind.as_str().to_string(), r.summary));
    }
    let rows: Vec<_> = reports.iter().map(|(k, m)| (k.clone(), m)).collect();
    print!("{}", report::metrics_table(&rows));
    Ok(())
}
