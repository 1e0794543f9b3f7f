//! Record, annotation, feature table, model and report persistence.

mod annotation;
mod record;
mod table;

pub use annotation::{load_annotations, save_annotations, AnnotationSet, AnnotationSpan, Label};
pub use record::{load_record, record_paths, save_record, EcgRecord};
pub use table::{
    load_feature_table, read_feature_table, save_feature_table, write_feature_table, FeatureRow, FeatureTable,
};
pub use crate::ml::{load_model, save_model};
