//! Evaluation harness: declarative config, multi-dataset sweeps, and
//! table rendering.

mod config;
mod emit;
mod harness;

pub use config::{
    load_config, DatasetEntry, EvalConfig, GapOrientation, HarnessOptions, SystemEntry,
};
pub use emit::{emit_gap_reports, emit_report, score_records_jsonl, OutputFormat};
pub use harness::{
    count_typed_mentions, run_evaluation, DatasetReport, EvalOutcome, EvalReport, SystemCell,
    TypedCell, LOW_SUPPORT_THRESHOLD,
};
