//! Parsing of coreference bracket files and dependency sidecars, token
//! alignment, scope filters, and split generation.

mod align;
mod bracket;
mod conllu;
mod filter;
mod jsonl;
mod split;

use std::fmt;

pub use align::{align, default_normalization_table, AlignOptions};
pub use bracket::{
    parse_coref_file, parse_coref_path, write_coref_file, IngestOptions, ParsedCorpus,
};
pub use conllu::{parse_dependency_file, parse_dependency_path, DepDocument, DepFile, DepSentence};
pub use filter::{filter_clusters, filter_scope, FilterStats, RawMention};
pub use jsonl::{corpus_from_jsonl, corpus_to_jsonl, document_to_json};
pub use split::{split_corpus, SplitCorpora, SplitRule};

/// A non-fatal condition noticed during ingest or alignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub doc_id: String,
    pub line: Option<usize>,
    pub message: String,
}

impl Warning {
    pub fn new(doc_id: impl Into<String>, line: Option<usize>, message: impl Into<String>) -> Self {
        Warning {
            doc_id: doc_id.into(),
            line,
            message: message.into(),
        }
    }
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "[{} line {}] {}", self.doc_id, line, self.message),
            None => write!(f, "[{}] {}", self.doc_id, self.message),
        }
    }
}
