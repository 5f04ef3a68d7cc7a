//! Attaches POS/head/deprel layers from a dependency sidecar onto parsed
//! corpora, matching by (document, sentence index, token index).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::ingest::{DepDocument, DepFile, DepSentence, Warning};
use crate::types::Corpus;

#[derive(Debug, Clone)]
pub struct AlignOptions {
    /// Token-form rewrites applied to both sides before comparison.
    pub normalization: BTreeMap<String, String>,
    /// Fraction of mismatching token forms per document above which
    /// alignment fails instead of warning.
    pub mismatch_threshold: f64,
    /// Skip documents absent from the sidecar instead of failing; such
    /// documents keep unannotated tokens and are excluded from typed
    /// scoring.
    pub allow_missing_parse: bool,
}

impl Default for AlignOptions {
    fn default() -> Self {
        AlignOptions {
            normalization: default_normalization_table(),
            mismatch_threshold: 0.05,
            allow_missing_parse: false,
        }
    }
}

/// Bracket escapes and quote conventions that differ between dataset
/// exports.
pub fn default_normalization_table() -> BTreeMap<String, String> {
    [
        ("-LRB-", "("),
        ("-RRB-", ")"),
        ("-LSB-", "["),
        ("-RSB-", "]"),
        ("-LCB-", "{"),
        ("-RCB-", "}"),
        ("``", "\""),
        ("''", "\""),
        ("`", "'"),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect()
}

fn normalize<'a>(form: &'a str, table: &'a BTreeMap<String, String>) -> &'a str {
    table.get(form).map(String::as_str).unwrap_or(form)
}

fn align_document(
    doc: &mut crate::types::Document,
    dep: &DepDocument,
    opts: &AlignOptions,
    warnings: &mut Vec<Warning>,
) -> Result<()> {
    if doc.sentences.len() != dep.sentences.len() {
        return Err(Error::alignment(
            &doc.doc_id,
            format!(
                "sentence count mismatch: corpus has {}, sidecar has {}",
                doc.sentences.len(),
                dep.sentences.len()
            ),
        ));
    }
    let mut mismatches = 0usize;
    let mut first_example: Option<String> = None;
    let total_tokens: usize = doc.sentences.iter().map(Vec::len).sum();

    for (si, (sentence, dep_sentence)) in doc.sentences.iter_mut().zip(&dep.sentences).enumerate() {
        if sentence.len() != dep_sentence.len() {
            return Err(Error::alignment(
                &doc.doc_id,
                format!(
                    "sentence {si}: token count mismatch ({} vs {} in sidecar)",
                    sentence.len(),
                    dep_sentence.len()
                ),
            ));
        }
        for (ti, token) in sentence.iter_mut().enumerate() {
            let ours = normalize(token.form.trim(), &opts.normalization);
            let theirs = normalize(dep_sentence.forms[ti].trim(), &opts.normalization);
            if ours != theirs {
                mismatches += 1;
                if first_example.is_none() {
                    first_example = Some(format!(
                        "sentence {si} token {ti}: '{}' vs '{}'",
                        token.form, dep_sentence.forms[ti]
                    ));
                }
            }
            token.pos = Some(dep_sentence.pos[ti].clone());
            token.head = Some(dep_sentence.heads[ti]);
            token.deprel = Some(dep_sentence.deprels[ti].clone());
        }
    }

    if mismatches > 0 {
        let rate = mismatches as f64 / total_tokens.max(1) as f64;
        if rate > opts.mismatch_threshold {
            return Err(Error::alignment(
                &doc.doc_id,
                format!(
                    "{mismatches}/{total_tokens} token forms differ beyond normalization \
                     (rate {:.1}% > threshold {:.1}%); first: {}",
                    rate * 100.0,
                    opts.mismatch_threshold * 100.0,
                    first_example.unwrap_or_default()
                ),
            ));
        }
        warnings.push(Warning::new(
            &doc.doc_id,
            None,
            format!(
                "{mismatches}/{total_tokens} token forms differ beyond normalization; first: {}",
                first_example.unwrap_or_default()
            ),
        ));
    }
    Ok(())
}

/// Attaches parse layers onto `corpus` in place. Documents are matched by
/// `# newdoc id` when the sidecar carries ids, otherwise sentences are
/// consumed sequentially in corpus order. Gold partitions are never
/// touched.
pub fn align(corpus: &mut Corpus, deps: &DepFile, opts: &AlignOptions) -> Result<Vec<Warning>> {
    let mut warnings = Vec::new();
    let tagged = deps.documents.iter().any(|d| d.doc_id.is_some());

    if tagged {
        let mut by_id: BTreeMap<&str, &DepDocument> = BTreeMap::new();
        for dep_doc in &deps.documents {
            let id = dep_doc.doc_id.as_deref().ok_or_else(|| {
                Error::alignment(
                    "<untagged>",
                    "sidecar mixes `# newdoc id` blocks with untagged blocks",
                )
            })?;
            if by_id.insert(id, dep_doc).is_some() {
                return Err(Error::alignment(
                    id,
                    "duplicate document in dependency sidecar",
                ));
            }
        }
        for doc in &mut corpus.documents {
            match by_id.remove(doc.doc_id.as_str()) {
                Some(dep_doc) => align_document(doc, dep_doc, opts, &mut warnings)?,
                None if opts.allow_missing_parse => {
                    warnings.push(Warning::new(
                        &doc.doc_id,
                        None,
                        "missing from dependency sidecar; typed metrics will skip this document",
                    ));
                }
                None => {
                    return Err(Error::alignment(
                        &doc.doc_id,
                        "missing from dependency sidecar (pass --allow-missing-parse to skip)",
                    ));
                }
            }
        }
        for id in by_id.keys() {
            warnings.push(Warning::new(
                *id,
                None,
                "sidecar document not present in corpus",
            ));
        }
    } else {
        let all_sentences: Vec<&DepSentence> = deps
            .documents
            .iter()
            .flat_map(|d| d.sentences.iter())
            .collect();
        let needed: usize = corpus.documents.iter().map(|d| d.sentences.len()).sum();
        if all_sentences.len() < needed {
            return Err(Error::alignment(
                corpus
                    .documents
                    .first()
                    .map(|d| d.doc_id.clone())
                    .unwrap_or_else(|| "<empty corpus>".into()),
                format!(
                    "untagged sidecar has {} sentences but the corpus needs {needed}",
                    all_sentences.len()
                ),
            ));
        }
        let mut cursor = 0usize;
        for doc in &mut corpus.documents {
            let n = doc.sentences.len();
            let dep_doc = DepDocument {
                doc_id: None,
                sentences: all_sentences[cursor..cursor + n]
                    .iter()
                    .cloned()
                    .cloned()
                    .collect(),
            };
            cursor += n;
            align_document(doc, &dep_doc, opts, &mut warnings)?;
        }
        if cursor < all_sentences.len() {
            warnings.push(Warning::new(
                "<sidecar>",
                None,
                format!(
                    "{} trailing sidecar sentences unused",
                    all_sentences.len() - cursor
                ),
            ));
        }
    }
    Ok(warnings)
}
