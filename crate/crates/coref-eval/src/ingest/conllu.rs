//! Dependency/POS sidecar reader. Rows follow the 10-column CoNLL-U
//! layout, of which ID, FORM, XPOS, HEAD, and DEPREL are consumed;
//! multiword-token ranges and empty nodes are skipped; blank lines
//! separate sentences; `# newdoc id = ...` comments delimit documents.

use std::path::Path;

use crate::error::{Error, Result};
use crate::types::HeadRef;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DepSentence {
    pub forms: Vec<String>,
    pub pos: Vec<String>,
    pub heads: Vec<HeadRef>,
    pub deprels: Vec<String>,
}

impl DepSentence {
    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DepDocument {
    pub doc_id: Option<String>,
    pub sentences: Vec<DepSentence>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DepFile {
    pub documents: Vec<DepDocument>,
}

impl DepFile {
    pub fn sentence_count(&self) -> usize {
        self.documents.iter().map(|d| d.sentences.len()).sum()
    }
}

#[derive(Default)]
struct PendingSentence {
    forms: Vec<String>,
    pos: Vec<String>,
    raw_heads: Vec<usize>,
    deprels: Vec<String>,
    lines: Vec<usize>,
}

impl PendingSentence {
    fn finish(self) -> Result<DepSentence> {
        let len = self.forms.len();
        let mut heads = Vec::with_capacity(len);
        let mut roots = 0usize;
        for (i, (&head, &line)) in self.raw_heads.iter().zip(&self.lines).enumerate() {
            if head == 0 {
                roots += 1;
                heads.push(HeadRef::Root);
                continue;
            }
            if head > len {
                return Err(Error::parse(
                    line,
                    format!("HEAD {head} out of range for a {len}-token sentence"),
                ));
            }
            if head - 1 == i {
                return Err(Error::parse(
                    line,
                    format!("token {} is its own head", i + 1),
                ));
            }
            if self.deprels[i].is_empty() || self.deprels[i] == "_" {
                return Err(Error::parse(
                    line,
                    format!("token {} has a head but no dependency relation", i + 1),
                ));
            }
            heads.push(HeadRef::Token(head - 1));
        }
        if roots != 1 {
            return Err(Error::parse(
                self.lines.first().copied().unwrap_or(0),
                format!("sentence has {roots} root tokens, expected exactly one"),
            ));
        }
        Ok(DepSentence {
            forms: self.forms,
            pos: self.pos,
            heads,
            deprels: self.deprels,
        })
    }
}

pub fn parse_dependency_file(text: &str) -> Result<DepFile> {
    let mut documents: Vec<DepDocument> = Vec::new();
    let mut current_doc = DepDocument::default();
    let mut started = false;
    let mut pending = PendingSentence::default();

    let flush_sentence = |pending: &mut PendingSentence, doc: &mut DepDocument| -> Result<()> {
        if !pending.forms.is_empty() {
            doc.sentences.push(std::mem::take(pending).finish()?);
        }
        Ok(())
    };

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim_end();

        if trimmed.trim().is_empty() {
            flush_sentence(&mut pending, &mut current_doc)?;
            continue;
        }
        if trimmed.starts_with('#') {
            if trimmed
                .trim_start_matches('#')
                .trim_start()
                .starts_with("newdoc")
            {
                flush_sentence(&mut pending, &mut current_doc)?;
                if started || !current_doc.sentences.is_empty() {
                    documents.push(std::mem::take(&mut current_doc));
                }
                started = true;
                current_doc.doc_id = trimmed.split_once('=').map(|(_, id)| id.trim().to_string());
            }
            continue;
        }

        let mut cols: Vec<&str> = trimmed.split('\t').collect();
        if cols.len() < 8 {
            cols = trimmed.split_whitespace().collect();
        }
        if cols.len() < 8 {
            return Err(Error::parse(
                line,
                format!("expected at least 8 columns, found {}", cols.len()),
            ));
        }
        let id = cols[0];
        if id.contains('-') || id.contains('.') {
            // Multiword-token range or empty node; the referenced
            // syntactic words follow on their own rows.
            continue;
        }
        let id: usize = id
            .parse()
            .map_err(|_| Error::parse(line, format!("malformed token ID '{id}'")))?;
        if id != pending.forms.len() + 1 {
            return Err(Error::parse(
                line,
                format!(
                    "token ID {id} out of sequence (expected {})",
                    pending.forms.len() + 1
                ),
            ));
        }
        let head: usize = cols[6]
            .parse()
            .map_err(|_| Error::parse(line, format!("malformed HEAD '{}'", cols[6])))?;
        pending.forms.push(cols[1].to_string());
        pending.pos.push(cols[4].to_string());
        pending.raw_heads.push(head);
        pending.deprels.push(cols[7].to_string());
        pending.lines.push(line);
    }
    flush_sentence(&mut pending, &mut current_doc)?;
    if started || !current_doc.sentences.is_empty() {
        documents.push(current_doc);
    }
    // Drop trailing marker-only blocks that never received sentences.
    documents.retain(|d| !d.sentences.is_empty());
    Ok(DepFile { documents })
}

pub fn parse_dependency_path(path: &Path) -> Result<DepFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_dependency_file(&text)
}
