//! Build features for a synthetic corpus, train a random forest, save it,
//! load it back and check the predictions agree.

use ecgsqa::experiment::{build_table, DatasetSummary, PipelineConfig};
use ecgsqa::io::{load_model, save_model};
use ecgsqa::ml::{metrics, predict, train_rf, ForestConfig};
use ecgsqa::synth::{build_corpus, CorpusSpec};

fn main() -> ecgsqa::Result<()> {
    let spec = CorpusSpec { n_records: 12, ma_weight: 0.4, seed: 21, ..Default::default() };
    let recs: Vec<_> = build_corpus("train", &spec)?.into_iter().map(|r| (r.record, r.annotations)).collect();
    let table = build_table("train", &recs, &PipelineConfig::default())?;
    let s = DatasetSummary::of(&table);
    println!("{} windows: {} clean, {} noisy, {} undetectable", s.total(), s.clean, s.noisy, s.invalid);

    let (x, y) = table.valid_xy();
    let model = train_rf(&x, &y, &ForestConfig { seed: 1, ..Default::default() })?;
    let path = std::env::temp_dir().join("ecgsqa_forest.json");
    save_model(&model, &path)?;
    let back = load_model(&path)?;

    let a = predict(&model, &x)?;
    let b = predict(&back, &x)?;
    assert_eq!(a, b);
    let m = metrics(&y, &a.labels, &a.scores)?;
    println!("training accuracy {:.4}, auprc {:.4}", m.accuracy, m.auprc.unwrap_or(f64::NAN));
    println!("model written to {}", path.display());
    Ok(())
}
