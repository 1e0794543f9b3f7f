//! Write a record with annotations and read it back.

use ecgsqa::io::{load_annotations, load_record, save_annotations, save_record, AnnotationSet, AnnotationSpan, EcgRecord, Label};

fn main() -> ecgsqa::Result<()> {
    let dir = std::env::temp_dir().join("ecgsqa_record_io");
    std::fs::create_dir_all(&dir).map_err(|e| ecgsqa::Error::io(&dir, e))?;

    let x: Vec<f64> = (0..3600).map(|i| (i as f64 / 57.3).sin() * 0.8).collect();
    let rec = EcgRecord::new("demo", x, 360.0)?;
    let ann = AnnotationSet::new("demo", vec![AnnotationSpan::new(1000, 2000, Label::Noisy)?])?;
    save_record(&rec, dir.join("demo.ecg"))?;
    save_annotations(&ann, dir.join("demo.ann"))?;

    let back = load_record(dir.join("demo.ecg"))?;
    let spans = load_annotations(dir.join("demo.ann"))?;
    assert_eq!(back, rec);
    println!("{}: {} samples at {} Hz, {} noisy samples", back.record_id(), back.len(), back.fs(), spans.noisy_total());
    println!("files in {}", dir.display());
    Ok(())
}
