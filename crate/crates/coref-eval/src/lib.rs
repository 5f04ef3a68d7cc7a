//! Evaluation toolkit for coreference resolution outputs.
//!
//! The crate ingests gold and system annotations in CoNLL bracket format
//! together with dependency/POS sidecars, scores cluster agreement with
//! mention-, link-, and entity-based metrics, disaggregates scores by
//! linguistically defined mention types, and quantifies in-domain vs.
//! out-of-domain generalization gaps with permutation significance
//! testing.

pub mod error;
pub mod fixtures;
pub mod gaps;
pub mod ingest;
pub mod metrics;
pub mod report;
pub mod types;
pub mod typing;

pub use error::{Error, Result};
pub use types::{Corpus, Document, EntityPartition, HeadRef, Span, Split, Token};
