//! Experiment runner, report writers and model files.

mod config;
mod experiment;
mod persist;
mod report;

pub use config::{named_profile, BaggingSettings, CorpusConfig, ExperimentConfig, SplitConfig, WeakParams};
pub use experiment::{run_experiment, EarlyStop, ExperimentOutcome, MarginEntry, SweepPoint, SweepSeries};
pub use persist::{from_json, load_model, save_model, to_json, SavedModel, FORMAT_VERSION};
pub use report::{
    emit_margins_csv, emit_sweep_csv, emit_table, emit_tables, footer, write_outputs, Metric, ReportFormat,
    ResultsTable, TableRow,
};
