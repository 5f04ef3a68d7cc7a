//! Core data model: tokens, spans, entity partitions, documents, corpora.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Governor of a token within its sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HeadRef {
    /// The token is the sentence root.
    Root,
    /// 0-based index of the governing token in the same sentence.
    Token(usize),
}

impl Serialize for HeadRef {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        match self {
            HeadRef::Root => serializer.serialize_i64(-1),
            HeadRef::Token(i) => serializer.serialize_i64(*i as i64),
        }
    }
}

impl<'de> Deserialize<'de> for HeadRef {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let v = i64::deserialize(deserializer)?;
        match v {
            -1 => Ok(HeadRef::Root),
            i if i >= 0 => Ok(HeadRef::Token(i as usize)),
            other => Err(serde::de::Error::custom(format!(
                "invalid head index {other}; expected -1 (root) or a non-negative index"
            ))),
        }
    }
}

/// One surface token. POS, head, and dependency relation are only present
/// after the corpus has been aligned with a dependency sidecar.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub form: String,
    pub pos: Option<String>,
    pub head: Option<HeadRef>,
    pub deprel: Option<String>,
}

impl Token {
    pub fn bare(form: impl Into<String>) -> Self {
        Token {
            form: form.into(),
            pos: None,
            head: None,
            deprel: None,
        }
    }

    pub fn is_parsed(&self) -> bool {
        self.pos.is_some() && self.head.is_some()
    }
}

/// A contiguous token interval within one sentence. `start` and `end` are
/// 0-based token indices and both inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "(usize, usize, usize)", try_from = "(usize, usize, usize)")]
pub struct Span {
    pub sentence: usize,
    pub start: usize,
    pub end: usize,
}

impl Span {
    /// Panics if `start > end`; spans are contiguous and non-empty by
    /// construction.
    pub fn new(sentence: usize, start: usize, end: usize) -> Self {
        assert!(start <= end, "span start {start} exceeds end {end}");
        Span {
            sentence,
            start,
            end,
        }
    }

    pub fn width(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn contains_token(&self, sentence: usize, index: usize) -> bool {
        self.sentence == sentence && self.start <= index && index <= self.end
    }

    /// Whether the two spans share at least one token position.
    pub fn overlaps(&self, other: &Span) -> bool {
        self.sentence == other.sentence && self.start <= other.end && other.start <= self.end
    }

    pub fn tokens(&self) -> impl Iterator<Item = usize> {
        self.start..=self.end
    }
}

impl From<Span> for (usize, usize, usize) {
    fn from(s: Span) -> Self {
        (s.sentence, s.start, s.end)
    }
}

impl TryFrom<(usize, usize, usize)> for Span {
    type Error = String;

    fn try_from(
        (sentence, start, end): (usize, usize, usize),
    ) -> std::result::Result<Self, String> {
        if start > end {
            return Err(format!("span start {start} exceeds end {end}"));
        }
        Ok(Span {
            sentence,
            start,
            end,
        })
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}-{}", self.sentence, self.start, self.end)
    }
}

/// A family of pairwise-disjoint mention clusters over one document.
///
/// Cluster ids are dense indices assigned in construction order; a span
/// belongs to at most one cluster. Empty clusters are dropped, duplicate
/// spans within one cluster are collapsed, and a span occurring in two
/// different clusters is rejected.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(into = "Vec<Vec<Span>>", try_from = "Vec<Vec<Span>>")]
pub struct EntityPartition {
    clusters: Vec<Vec<Span>>,
    mention_index: BTreeMap<Span, usize>,
}

impl EntityPartition {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_clusters(clusters: Vec<Vec<Span>>) -> Result<Self> {
        let mut mention_index = BTreeMap::new();
        let mut out: Vec<Vec<Span>> = Vec::with_capacity(clusters.len());
        for cluster in clusters {
            if cluster.is_empty() {
                continue;
            }
            let id = out.len();
            let mut spans = cluster;
            spans.sort();
            spans.dedup();
            for &span in &spans {
                if mention_index.insert(span, id).is_some() {
                    return Err(Error::Internal(format!(
                        "span {span} appears in more than one cluster"
                    )));
                }
            }
            out.push(spans);
        }
        Ok(EntityPartition {
            clusters: out,
            mention_index,
        })
    }

    pub fn clusters(&self) -> &[Vec<Span>] {
        &self.clusters
    }

    pub fn cluster_spans(&self, id: usize) -> &[Span] {
        &self.clusters[id]
    }

    pub fn cluster_of(&self, span: &Span) -> Option<usize> {
        self.mention_index.get(span).copied()
    }

    pub fn contains(&self, span: &Span) -> bool {
        self.mention_index.contains_key(span)
    }

    /// Iterates mentions cluster by cluster, spans in sorted order within
    /// each cluster. This order is the canonical summation order for the
    /// mention-averaged metrics.
    pub fn mentions(&self) -> impl Iterator<Item = (Span, usize)> + '_ {
        self.clusters
            .iter()
            .enumerate()
            .flat_map(|(id, spans)| spans.iter().map(move |&s| (s, id)))
    }

    pub fn mention_count(&self) -> usize {
        self.mention_index.len()
    }

    pub fn cluster_count(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn min_cluster_size(&self) -> Option<usize> {
        self.clusters.iter().map(Vec::len).min()
    }

    /// Set-of-sets equality, ignoring cluster ids and ordering.
    pub fn partition_eq(&self, other: &EntityPartition) -> bool {
        use std::collections::BTreeSet;
        let canon =
            |p: &EntityPartition| -> BTreeSet<Vec<Span>> { p.clusters.iter().cloned().collect() };
        canon(self) == canon(other)
    }
}

impl From<EntityPartition> for Vec<Vec<Span>> {
    fn from(p: EntityPartition) -> Self {
        p.clusters
    }
}

impl TryFrom<Vec<Vec<Span>>> for EntityPartition {
    type Error = String;

    fn try_from(clusters: Vec<Vec<Span>>) -> std::result::Result<Self, String> {
        EntityPartition::from_clusters(clusters).map_err(|e| e.to_string())
    }
}

/// One document: sentences of tokens plus the gold entity partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub sentences: Vec<Vec<Token>>,
    #[serde(rename = "clusters")]
    pub gold: EntityPartition,
}

impl Document {
    pub fn word_count(&self) -> usize {
        self.sentences.iter().map(Vec::len).sum()
    }

    pub fn token(&self, sentence: usize, index: usize) -> Option<&Token> {
        self.sentences.get(sentence).and_then(|s| s.get(index))
    }

    pub fn span_in_bounds(&self, span: &Span) -> bool {
        self.sentences
            .get(span.sentence)
            .is_some_and(|s| span.end < s.len())
    }

    pub fn span_text(&self, span: &Span) -> String {
        match self.sentences.get(span.sentence) {
            Some(s) if span.start < s.len() => s[span.start..=span.end.min(s.len() - 1)]
                .iter()
                .map(|t| t.form.as_str())
                .collect::<Vec<_>>()
                .join(" "),
            _ => String::new(),
        }
    }

    /// True when every token in every sentence carries POS and head
    /// information. Typed metrics skip documents that are not.
    pub fn is_parse_aligned(&self) -> bool {
        !self.sentences.is_empty()
            && self
                .sentences
                .iter()
                .all(|s| s.iter().all(Token::is_parsed))
    }

    /// Structural checks: gold spans in bounds, heads in range, no
    /// head self-loops.
    pub fn validate(&self) -> Result<()> {
        for (span, _) in self.gold.mentions() {
            if !self.span_in_bounds(&span) {
                return Err(Error::Internal(format!(
                    "document '{}': mention {span} is out of bounds",
                    self.doc_id
                )));
            }
        }
        for (si, sentence) in self.sentences.iter().enumerate() {
            for (ti, token) in sentence.iter().enumerate() {
                if let Some(HeadRef::Token(h)) = token.head {
                    if h == ti {
                        return Err(Error::Internal(format!(
                            "document '{}': token {si}:{ti} is its own head",
                            self.doc_id
                        )));
                    }
                    if h >= sentence.len() {
                        return Err(Error::Internal(format!(
                            "document '{}': token {si}:{ti} has head {h} outside the sentence",
                            self.doc_id
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Dataset split label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
    #[default]
    Test,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Split::Train => write!(f, "train"),
            Split::Dev => write!(f, "dev"),
            Split::Test => write!(f, "test"),
        }
    }
}

impl std::str::FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "dev" => Ok(Split::Dev),
            "test" => Ok(Split::Test),
            other => Err(Error::Config(format!(
                "unknown split '{other}' (expected train, dev, or test)"
            ))),
        }
    }
}

/// An ordered collection of documents under one dataset name and split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub name: String,
    pub split: Split,
    pub documents: Vec<Document>,
}

impl Corpus {
    pub fn new(name: impl Into<String>, split: Split) -> Self {
        Corpus {
            name: name.into(),
            split,
            documents: Vec::new(),
        }
    }

    pub fn document(&self, doc_id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.doc_id == doc_id)
    }

    pub fn mention_count(&self) -> usize {
        self.documents.iter().map(|d| d.gold.mention_count()).sum()
    }

    /// Unique ids plus per-document structural validity.
    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::BTreeSet::new();
        for doc in &self.documents {
            if !seen.insert(doc.doc_id.as_str()) {
                return Err(Error::Internal(format!(
                    "duplicate document id '{}' in corpus '{}'",
                    doc.doc_id, self.name
                )));
            }
            doc.validate()?;
        }
        Ok(())
    }
}
