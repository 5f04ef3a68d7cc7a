//! Canonical JSON-lines corpus dump: one document per line with tokens,
//! parse layers, and clusters. Field order is fixed, so identical corpora
//! serialize byte-identically.

use crate::error::{Error, Result};
use crate::types::{Corpus, Document, Split};

pub fn document_to_json(doc: &Document) -> Result<String> {
    serde_json::to_string(doc).map_err(|e| Error::Internal(format!("JSON encoding failed: {e}")))
}

pub fn corpus_to_jsonl(corpus: &Corpus) -> Result<String> {
    let mut out = String::new();
    for doc in &corpus.documents {
        out.push_str(&document_to_json(doc)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn corpus_from_jsonl(name: &str, split: Split, text: &str) -> Result<Corpus> {
    let mut corpus = Corpus::new(name, split);
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let doc: Document = serde_json::from_str(line)
            .map_err(|e| Error::parse(idx + 1, format!("bad document record: {e}")))?;
        doc.validate()?;
        corpus.documents.push(doc);
    }
    corpus.validate()?;
    Ok(corpus)
}
