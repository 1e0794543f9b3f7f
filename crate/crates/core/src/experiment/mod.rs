//! Experiment harness: feature extraction over datasets and the
//! within-dataset, cross-dataset and window-length protocols.

pub mod commands;
pub mod config;
pub mod cross;
pub mod data;
pub mod pipeline;
pub mod report;
pub mod sweep;
pub mod within;

pub use commands::{build_tables, cmd_cross, cmd_pipeline, cmd_sweep_window, cmd_within};
pub use config::{DatasetSpec, RunConfig, SweepConfig, SEED_ENV};
pub use cross::{cross_matrix, run_one, CrossConfig, CrossMatrix, CrossSection, RunSpec};
pub use data::{dataset_records, dataset_table, load_record_dir, LabelledRecord};
pub use pipeline::{build_table, format_summary, record_features, DatasetSummary, PipelineConfig};
pub use report::{load_report, render_text, report_to_json, save_report, Report, REPORT_FORMAT_VERSION};
pub use sweep::{sweep_window, SweepReport, SweepRow};
pub use within::{within_eval, Aggregation, WithinConfig, WithinReport};
