//! CoNLL bracket-column coreference format: `#begin document` /
//! `#end document` delimiters, one token per line, and a final column of
//! cluster brackets (`(12`, `12)`, `(12)`, pipe-separated when stacked).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::ingest::Warning;
use crate::types::{Corpus, Document, EntityPartition, Span, Split, Token};

#[derive(Debug, Clone)]
pub struct IngestOptions {
    pub corpus_name: String,
    pub split: Split,
    /// Column holding the token form. When unset, column 3 is used for
    /// rows with five or more columns (the shared-task layout) and
    /// column 0 otherwise. The bracket column is always the last one.
    pub form_column: Option<usize>,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            corpus_name: "corpus".into(),
            split: Split::Test,
            form_column: None,
        }
    }
}

impl IngestOptions {
    pub fn named(name: impl Into<String>) -> Self {
        IngestOptions {
            corpus_name: name.into(),
            ..IngestOptions::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct ParsedCorpus {
    pub corpus: Corpus,
    pub warnings: Vec<Warning>,
}

enum BracketItem {
    Open(u32),
    Close(u32),
    Single(u32),
}

fn parse_bracket_field(field: &str, line: usize) -> Result<Vec<BracketItem>> {
    if field == "-" || field == "_" {
        return Ok(Vec::new());
    }
    field
        .split('|')
        .map(|item| {
            let opens = item.starts_with('(');
            let closes = item.ends_with(')');
            let digits = item.trim_start_matches('(').trim_end_matches(')');
            let id: u32 = digits.parse().map_err(|_| {
                Error::parse(line, format!("malformed coreference bracket item '{item}'"))
            })?;
            match (opens, closes) {
                (true, true) => Ok(BracketItem::Single(id)),
                (true, false) => Ok(BracketItem::Open(id)),
                (false, true) => Ok(BracketItem::Close(id)),
                (false, false) => Err(Error::parse(
                    line,
                    format!(
                        "coreference item '{item}' has neither an opening nor a closing bracket"
                    ),
                )),
            }
        })
        .collect()
}

/// State for the document currently being read.
struct DocBuilder {
    doc_id: String,
    begin_line: usize,
    sentences: Vec<Vec<Token>>,
    current: Vec<Token>,
    /// Per-cluster stack of open brackets: (sentence, start token).
    /// Closes match the most recent open of the same cluster id, which
    /// reads stacked same-id brackets as nested mentions.
    open: BTreeMap<u32, Vec<(usize, usize)>>,
    /// (cluster id, span, line of the closing bracket).
    mentions: Vec<(u32, Span, usize)>,
}

impl DocBuilder {
    fn new(doc_id: String, begin_line: usize) -> Self {
        DocBuilder {
            doc_id,
            begin_line,
            sentences: Vec::new(),
            current: Vec::new(),
            open: BTreeMap::new(),
            mentions: Vec::new(),
        }
    }

    fn flush_sentence(&mut self, line: usize) -> Result<()> {
        if let Some((id, stack)) = self.open.iter().find(|(_, stack)| !stack.is_empty()) {
            let (_, start) = stack[stack.len() - 1];
            return Err(Error::parse(
                line,
                format!(
                    "cluster {id} opened at token {start} is still open at a sentence boundary in document '{}'",
                    self.doc_id
                ),
            ));
        }
        if !self.current.is_empty() {
            self.sentences.push(std::mem::take(&mut self.current));
        }
        Ok(())
    }

    fn push_token(&mut self, form: &str, field: &str, line: usize) -> Result<()> {
        let sent = self.sentences.len();
        let index = self.current.len();
        for item in parse_bracket_field(field, line)? {
            match item {
                BracketItem::Open(id) => {
                    self.open.entry(id).or_default().push((sent, index));
                }
                BracketItem::Close(id) => {
                    let (s, start) =
                        self.open.get_mut(&id).and_then(Vec::pop).ok_or_else(|| {
                            Error::parse(
                                line,
                                format!("closing bracket for cluster {id} without a matching open"),
                            )
                        })?;
                    self.mentions.push((id, Span::new(s, start, index), line));
                }
                BracketItem::Single(id) => {
                    self.mentions
                        .push((id, Span::new(sent, index, index), line));
                }
            }
        }
        self.current.push(Token::bare(form));
        Ok(())
    }

    fn finish(mut self, line: usize, warnings: &mut Vec<Warning>) -> Result<Document> {
        self.flush_sentence(line)?;
        if self.sentences.is_empty() {
            warnings.push(Warning::new(
                &self.doc_id,
                Some(self.begin_line),
                "document has no tokens",
            ));
        }

        // Group mentions into clusters in order of first appearance,
        // collapsing duplicate spans within a cluster and rejecting a
        // span claimed by two different clusters.
        let mut cluster_of: BTreeMap<Span, u32> = BTreeMap::new();
        let mut order: Vec<u32> = Vec::new();
        let mut clusters: BTreeMap<u32, Vec<Span>> = BTreeMap::new();
        for (id, span, mention_line) in self.mentions {
            match cluster_of.get(&span) {
                Some(&prev) if prev == id => {
                    warnings.push(Warning::new(
                        &self.doc_id,
                        Some(mention_line),
                        format!("duplicate span {span} in cluster {id} collapsed to one mention"),
                    ));
                    continue;
                }
                Some(&prev) => {
                    return Err(Error::parse(
                        mention_line,
                        format!(
                            "span {span} belongs to clusters {prev} and {id} in document '{}'",
                            self.doc_id
                        ),
                    ));
                }
                None => {
                    cluster_of.insert(span, id);
                }
            }
            if !clusters.contains_key(&id) {
                order.push(id);
            }
            clusters.entry(id).or_default().push(span);
        }
        let gold = EntityPartition::from_clusters(
            order
                .into_iter()
                .map(|id| clusters.remove(&id).unwrap())
                .collect(),
        )?;

        Ok(Document {
            doc_id: self.doc_id,
            sentences: self.sentences,
            gold,
        })
    }
}

pub fn parse_coref_file(text: &str, options: &IngestOptions) -> Result<ParsedCorpus> {
    let mut corpus = Corpus::new(options.corpus_name.clone(), options.split);
    let mut warnings = Vec::new();
    let mut builder: Option<DocBuilder> = None;
    let mut last_line = 0usize;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let trimmed = raw.trim();

        if let Some(rest) = trimmed.strip_prefix("#begin document") {
            if builder.is_some() {
                return Err(Error::parse(line, "nested '#begin document'"));
            }
            let doc_id = rest.trim().to_string();
            if doc_id.is_empty() {
                return Err(Error::parse(
                    line,
                    "'#begin document' without a document id",
                ));
            }
            builder = Some(DocBuilder::new(doc_id, line));
            continue;
        }
        if trimmed.starts_with("#end document") {
            let b = builder
                .take()
                .ok_or_else(|| Error::parse(line, "'#end document' without '#begin document'"))?;
            corpus.documents.push(b.finish(line, &mut warnings)?);
            continue;
        }
        match builder.as_mut() {
            None => {
                if trimmed.is_empty() || trimmed.starts_with('#') {
                    continue;
                }
                return Err(Error::parse(line, "token line outside of a document"));
            }
            Some(b) => {
                if trimmed.is_empty() {
                    b.flush_sentence(line)?;
                    continue;
                }
                if trimmed.starts_with('#') {
                    continue;
                }
                let cols: Vec<&str> = trimmed.split_whitespace().collect();
                if cols.len() < 2 {
                    return Err(Error::parse(
                        line,
                        "token line needs at least a form column and a coreference column",
                    ));
                }
                let form_col = match options.form_column {
                    Some(c) => c,
                    None if cols.len() >= 5 => 3,
                    None => 0,
                };
                if form_col >= cols.len() - 1 {
                    return Err(Error::parse(
                        line,
                        format!(
                            "form column {form_col} collides with the coreference column on a {}-column row",
                            cols.len()
                        ),
                    ));
                }
                b.push_token(cols[form_col], cols[cols.len() - 1], line)?;
            }
        }
    }

    if let Some(b) = builder {
        return Err(Error::parse(
            last_line,
            format!("document '{}' is missing '#end document'", b.doc_id),
        ));
    }
    corpus.validate()?;
    Ok(ParsedCorpus { corpus, warnings })
}

pub fn parse_coref_path(path: &Path, options: &IngestOptions) -> Result<ParsedCorpus> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_coref_file(&text, options)
}

/// Two same-cluster spans that strictly cross (overlap without nesting)
/// have no bracket encoding: per-cluster LIFO matching always reads the
/// profile back as a nested pair.
fn find_crossing_spans(cluster: &[Span]) -> Option<(Span, Span)> {
    for (i, a) in cluster.iter().enumerate() {
        for b in &cluster[i + 1..] {
            if a.sentence == b.sentence {
                let (first, second) = if a.start <= b.start { (a, b) } else { (b, a) };
                if first.start < second.start && second.start <= first.end && first.end < second.end
                {
                    return Some((*a, *b));
                }
            }
        }
    }
    None
}

/// Serializes the gold partitions back to bracket format. Re-parsing the
/// output yields partition-equal documents (cluster ids are renumbered).
/// Corpora parsed from bracket files always serialize; partitions built
/// elsewhere are rejected if a cluster contains crossing spans, which the
/// format cannot represent.
pub fn write_coref_file(corpus: &Corpus) -> Result<String> {
    let mut out = String::new();
    for doc in &corpus.documents {
        for (cid, cluster) in doc.gold.clusters().iter().enumerate() {
            if let Some((a, b)) = find_crossing_spans(cluster) {
                return Err(Error::Internal(format!(
                    "document '{}': cluster {cid} holds crossing spans {a} and {b}, \
                     which bracket format cannot represent",
                    doc.doc_id
                )));
            }
        }
        let _ = writeln!(out, "#begin document {}", doc.doc_id);

        // (sentence, token) -> bracket items. Closes are emitted before
        // opens so adjacent same-cluster spans re-parse correctly under
        // per-cluster LIFO matching.
        let mut opens: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
        let mut closes: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
        let mut singles: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (cid, cluster) in doc.gold.clusters().iter().enumerate() {
            for span in cluster {
                if span.width() == 1 {
                    singles
                        .entry((span.sentence, span.start))
                        .or_default()
                        .push(cid);
                } else {
                    opens
                        .entry((span.sentence, span.start))
                        .or_default()
                        .push((cid, span.end));
                    closes
                        .entry((span.sentence, span.end))
                        .or_default()
                        .push((cid, span.start));
                }
            }
        }

        for (si, sentence) in doc.sentences.iter().enumerate() {
            for (ti, token) in sentence.iter().enumerate() {
                let mut items: Vec<String> = Vec::new();
                if let Some(ends) = closes.get_mut(&(si, ti)) {
                    // Inner spans (later start) close first.
                    ends.sort_by_key(|&(_, start)| std::cmp::Reverse(start));
                    items.extend(ends.iter().map(|(cid, _)| format!("{cid})")));
                }
                if let Some(cids) = singles.get_mut(&(si, ti)) {
                    cids.sort_unstable();
                    items.extend(cids.iter().map(|cid| format!("({cid})")));
                }
                if let Some(starts) = opens.get_mut(&(si, ti)) {
                    // Outer spans (later end) open first.
                    starts.sort_by_key(|&(_, end)| std::cmp::Reverse(end));
                    items.extend(starts.iter().map(|(cid, _)| format!("({cid}")));
                }
                let coref = if items.is_empty() {
                    "-".to_string()
                } else {
                    items.join("|")
                };
                let _ = writeln!(out, "- 0 {ti} {} {coref}", token.form);
            }
            out.push('\n');
        }
        let _ = writeln!(out, "#end document");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> ParsedCorpus {
        parse_coref_file(text, &IngestOptions::default()).unwrap()
    }

    #[test]
    fn minimal_bracket_pair_forms_one_two_token_mention() {
        let text = "#begin document (test)\nthe (0\nband 0)\n\n#end document\n";
        let parsed = parse(text);
        let doc = &parsed.corpus.documents[0];
        assert_eq!(doc.word_count(), 2);
        assert_eq!(doc.gold.cluster_count(), 1);
        assert_eq!(doc.gold.cluster_spans(0), &[Span::new(0, 0, 1)]);
        assert!(parsed.warnings.is_empty());
    }

    #[test]
    fn two_width_one_mentions_share_a_cluster() {
        let text = "#begin document (test)\ntrees (0)\nfall -\ntrees (0)\n\n#end document\n";
        let parsed = parse(text);
        let doc = &parsed.corpus.documents[0];
        assert_eq!(doc.gold.cluster_count(), 1);
        assert_eq!(
            doc.gold.cluster_spans(0),
            &[Span::new(0, 0, 0), Span::new(0, 2, 2)]
        );
    }

    #[test]
    fn stacked_and_nested_brackets() {
        // he(0 himself(1|(0) 0) saw -: spans (0,0-1) cluster0, (0,1,1) cluster1... use a
        // same-id nesting instead: [he [himself]] with both in cluster 0.
        let text = "#begin document (test)\nhe (0\nhimself (0)|0)\n\n#end document\n";
        let parsed = parse(text);
        let doc = &parsed.corpus.documents[0];
        assert_eq!(doc.gold.cluster_count(), 1);
        assert_eq!(
            doc.gold.cluster_spans(0),
            &[Span::new(0, 0, 1), Span::new(0, 1, 1)]
        );
    }

    #[test]
    fn unmatched_brackets_are_rejected_with_line_numbers() {
        let text = "#begin document (test)\na (0\nb -\n\n#end document\n";
        let err = parse_coref_file(text, &IngestOptions::default()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 4),
            other => panic!("expected parse error, got {other:?}"),
        }

        let text = "#begin document (test)\na 0)\n\n#end document\n";
        let err = parse_coref_file(text, &IngestOptions::default()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_span_in_one_cluster_collapses_with_warning() {
        let text = "#begin document (test)\na (0)|(0)\nb (0)\n\n#end document\n";
        let parsed = parse(text);
        assert_eq!(parsed.warnings.len(), 1);
        assert_eq!(parsed.corpus.documents[0].gold.mention_count(), 2);
    }

    #[test]
    fn duplicate_span_across_clusters_is_a_hard_error() {
        let text = "#begin document (test)\na (0)|(1)\nb (0)\nc (1)\n\n#end document\n";
        assert!(matches!(
            parse_coref_file(text, &IngestOptions::default()),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn shared_task_layout_reads_form_from_column_three() {
        let text = "#begin document (bc/cctv); part 000\n\
                    bc/cctv 0 0 Taiwan NNP * - - - * (0)\n\
                    bc/cctv 0 1 authorities NNS * - - - * -\n\
                    \n\
                    bc/cctv 0 0 Taiwan NNP * - - - * (0)\n\
                    \n\
                    #end document\n";
        let parsed = parse(text);
        let doc = &parsed.corpus.documents[0];
        assert_eq!(doc.doc_id, "(bc/cctv); part 000");
        assert_eq!(doc.sentences.len(), 2);
        assert_eq!(doc.sentences[0][0].form, "Taiwan");
        assert_eq!(doc.gold.mention_count(), 2);
    }

    #[test]
    fn round_trip_preserves_partitions_and_forms() {
        let text = "#begin document (test)\n\
                    the (0\nquick (1)|0)\nfox (0)|(2\njumps 2)\n\n\
                    high -\n\n#end document\n";
        let parsed = parse(text);
        let rewritten = write_coref_file(&parsed.corpus).unwrap();
        let reparsed = parse(&rewritten);
        let a = &parsed.corpus.documents[0];
        let b = &reparsed.corpus.documents[0];
        assert_eq!(a.doc_id, b.doc_id);
        assert_eq!(a.sentences, b.sentences);
        assert!(a.gold.partition_eq(&b.gold));
    }

    #[test]
    fn crossing_same_cluster_spans_cannot_serialize() {
        use crate::types::{Document, EntityPartition, Token};
        let gold =
            EntityPartition::from_clusters(vec![vec![Span::new(0, 1, 3), Span::new(0, 2, 4)]])
                .unwrap();
        let corpus = Corpus {
            name: "x".into(),
            split: crate::types::Split::Test,
            documents: vec![Document {
                doc_id: "(x)".into(),
                sentences: vec![(0..6).map(|i| Token::bare(format!("w{i}"))).collect()],
                gold,
            }],
        };
        assert!(matches!(write_coref_file(&corpus), Err(Error::Internal(_))));

        // Nested same-cluster spans serialize fine, including shared
        // boundaries.
        let nested = EntityPartition::from_clusters(vec![vec![
            Span::new(0, 1, 4),
            Span::new(0, 1, 2),
            Span::new(0, 3, 4),
        ]])
        .unwrap();
        let corpus = Corpus {
            name: "x".into(),
            split: crate::types::Split::Test,
            documents: vec![Document {
                doc_id: "(x)".into(),
                sentences: vec![(0..6).map(|i| Token::bare(format!("w{i}"))).collect()],
                gold: nested.clone(),
            }],
        };
        let text = write_coref_file(&corpus).unwrap();
        let reparsed = parse(&text);
        assert!(reparsed.corpus.documents[0].gold.partition_eq(&nested));
    }

    #[test]
    fn token_outside_document_is_rejected() {
        assert!(matches!(
            parse_coref_file("stray -\n", &IngestOptions::default()),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn missing_end_document_is_rejected() {
        assert!(matches!(
            parse_coref_file("#begin document (x)\na -\n", &IngestOptions::default()),
            Err(Error::Parse { .. })
        ));
    }
}
