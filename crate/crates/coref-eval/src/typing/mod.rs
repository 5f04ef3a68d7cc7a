//! Classification of mentions into coreference types using POS tags,
//! dependency edges, and cluster membership.
//!
//! The relation-dependent types (nested, copular, appositive) are
//! evaluated against the partition the mention belongs to — gold when
//! scoring recall, predicted when scoring precision — so a mention's
//! types can differ between the two sides. All predicates are pure.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::TypePredicate;
use crate::types::{Document, EntityPartition, HeadRef, Span};

/// Labels and label sets the predicates depend on; dataset exports vary
/// in parser conventions, so these are configurable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TypingConfig {
    /// Dependency relations marking a compound modifier head.
    pub compound_labels: BTreeSet<String>,
    /// POS tags counting as the single separator token of an apposition.
    pub punctuation_pos: BTreeSet<String>,
    /// Lowercased indefinite article forms.
    pub indefinite_articles: BTreeSet<String>,
    pub determiner_relation: String,
    pub subject_relation: String,
    pub copula_relation: String,
    pub plural_noun_pos: String,
}

impl Default for TypingConfig {
    fn default() -> Self {
        let set = |items: &[&str]| items.iter().map(|s| s.to_string()).collect();
        TypingConfig {
            compound_labels: set(&["compound:nn", "compound", "nn"]),
            punctuation_pos: set(&[",", ":", "-LRB-", "-RRB-", "HYPH"]),
            indefinite_articles: set(&["a", "an"]),
            determiner_relation: "det".into(),
            subject_relation: "nsubj".into(),
            copula_relation: "cop".into(),
            plural_noun_pos: "NNS".into(),
        }
    }
}

/// The coreference types assigned to mentions. Tags are non-exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MentionType {
    Nested,
    OnGeneric,
    Compound,
    Copular,
    VerbPhrase,
    Appositive,
}

impl MentionType {
    pub const ALL: [MentionType; 6] = [
        MentionType::Nested,
        MentionType::OnGeneric,
        MentionType::Compound,
        MentionType::Copular,
        MentionType::VerbPhrase,
        MentionType::Appositive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MentionType::Nested => "nested",
            MentionType::OnGeneric => "on_generic",
            MentionType::Compound => "compound",
            MentionType::Copular => "copular",
            MentionType::VerbPhrase => "verb_phrase",
            MentionType::Appositive => "appositive",
        }
    }
}

impl fmt::Display for MentionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for MentionType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nested" => Ok(MentionType::Nested),
            "on_generic" | "on-generic" | "generic" => Ok(MentionType::OnGeneric),
            "compound" => Ok(MentionType::Compound),
            "copular" => Ok(MentionType::Copular),
            "verb_phrase" | "verb-phrase" | "vp" => Ok(MentionType::VerbPhrase),
            "appositive" => Ok(MentionType::Appositive),
            other => Err(Error::Config(format!("unknown mention type '{other}'"))),
        }
    }
}

/// Which partition a typed mention was classified against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionOrigin {
    Gold,
    Predicted,
}

/// Syntactic head of a span: the unique token whose governor lies outside
/// the span (or is the sentence root). If several qualify the leftmost
/// wins; if none do (cyclic coverage) the rightmost token wins. Tokens
/// without parse information count as externally governed.
pub fn find_head(span: Span, doc: &Document) -> (usize, usize) {
    let Some(sentence) = doc.sentences.get(span.sentence) else {
        return (span.sentence, span.end);
    };
    if sentence.is_empty() {
        return (span.sentence, span.end);
    }
    let end = span.end.min(sentence.len() - 1);
    for (i, token) in sentence.iter().enumerate().take(end + 1).skip(span.start) {
        let external = match token.head {
            Some(HeadRef::Root) | None => true,
            Some(HeadRef::Token(h)) => !(span.start..=end).contains(&h),
        };
        if external {
            return (span.sentence, i);
        }
    }
    (span.sentence, end)
}

fn ensure_member(span: Span, partition: &EntityPartition) -> Result<usize> {
    partition.cluster_of(&span).ok_or_else(|| {
        Error::Internal(format!("mention {span} is not part of the given partition"))
    })
}

/// True iff another mention of the same cluster overlaps the span (larger,
/// smaller, or partially overlapping).
pub fn is_nested(span: Span, partition: &EntityPartition) -> Result<bool> {
    let cluster = ensure_member(span, partition)?;
    Ok(partition
        .cluster_spans(cluster)
        .iter()
        .any(|other| *other != span && other.overlaps(&span)))
}

/// A generic noun phrase by the OntoNotes operationalization: the span
/// head has an indefinite-article determiner inside the span, or it has no
/// determiner inside the span at all and carries a plural-noun POS tag.
pub fn is_on_generic(span: Span, doc: &Document, cfg: &TypingConfig) -> bool {
    let (hs, hi) = find_head(span, doc);
    let Some(sentence) = doc.sentences.get(hs) else {
        return false;
    };
    if hi >= sentence.len() {
        return false;
    }
    let mut has_det = false;
    let mut indefinite = false;
    for token in &sentence[span.start..=span.end.min(sentence.len() - 1)] {
        if token.deprel.as_deref() == Some(cfg.determiner_relation.as_str())
            && token.head == Some(HeadRef::Token(hi))
        {
            has_det = true;
            if cfg.indefinite_articles.contains(&token.form.to_lowercase()) {
                indefinite = true;
            }
        }
    }
    if indefinite {
        return true;
    }
    !has_det && sentence[hi].pos.as_deref() == Some(cfg.plural_noun_pos.as_str())
}

/// True iff the span head is the dependent of a compound relation.
pub fn is_compound(span: Span, doc: &Document, cfg: &TypingConfig) -> bool {
    let (hs, hi) = find_head(span, doc);
    doc.token(hs, hi)
        .and_then(|t| t.deprel.as_deref())
        .is_some_and(|rel| cfg.compound_labels.contains(rel))
}

/// True iff the span consists of only V* POS tags.
pub fn is_verb_phrase(span: Span, doc: &Document) -> bool {
    let Some(sentence) = doc.sentences.get(span.sentence) else {
        return false;
    };
    if span.end >= sentence.len() {
        return false;
    }
    sentence[span.start..=span.end]
        .iter()
        .all(|t| t.pos.as_deref().is_some_and(|p| p.starts_with('V')))
}

/// True iff a coreferring mention in the same sentence stands in a subject
/// relation with this one and the rightmost of the two heads a copula.
pub fn is_copular(
    span: Span,
    partition: &EntityPartition,
    doc: &Document,
    cfg: &TypingConfig,
) -> Result<bool> {
    let cluster = ensure_member(span, partition)?;
    let Some(sentence) = doc.sentences.get(span.sentence) else {
        return Ok(false);
    };
    let (_, head) = find_head(span, doc);
    for other in partition.cluster_spans(cluster) {
        if *other == span || other.sentence != span.sentence {
            continue;
        }
        let (_, other_head) = find_head(*other, doc);
        let subj_of = |dep: usize, gov: usize| {
            sentence[dep].deprel.as_deref() == Some(cfg.subject_relation.as_str())
                && sentence[dep].head == Some(HeadRef::Token(gov))
        };
        if !(subj_of(head, other_head) || subj_of(other_head, head)) {
            continue;
        }
        let rightmost = if (other.start, other.end) > (span.start, span.end) {
            other_head
        } else {
            head
        };
        let has_copula = sentence.iter().any(|t| {
            t.deprel.as_deref() == Some(cfg.copula_relation.as_str())
                && t.head == Some(HeadRef::Token(rightmost))
        });
        if has_copula {
            return Ok(true);
        }
    }
    Ok(false)
}

/// True iff a coreferring mention in the same sentence is adjacent or
/// separated by exactly one punctuation token.
pub fn is_appositive(
    span: Span,
    partition: &EntityPartition,
    doc: &Document,
    cfg: &TypingConfig,
) -> Result<bool> {
    let cluster = ensure_member(span, partition)?;
    let Some(sentence) = doc.sentences.get(span.sentence) else {
        return Ok(false);
    };
    for other in partition.cluster_spans(cluster) {
        if *other == span || other.sentence != span.sentence || other.overlaps(&span) {
            continue;
        }
        let (left, right) = if other.start < span.start {
            (other, &span)
        } else {
            (&span, other)
        };
        let gap = right.start - left.end - 1;
        match gap {
            0 => return Ok(true),
            1 => {
                let between = &sentence[left.end + 1];
                if between
                    .pos
                    .as_deref()
                    .is_some_and(|p| cfg.punctuation_pos.contains(p))
                {
                    return Ok(true);
                }
            }
            _ => {}
        }
    }
    Ok(false)
}

/// A mention with its computed head and type set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypedMention {
    pub span: Span,
    pub head: (usize, usize),
    pub types: BTreeSet<MentionType>,
    pub origin: PartitionOrigin,
}

/// Classifies every mention of the partition. The relation-dependent
/// types read only the partition passed here, recorded in `origin`.
pub fn type_all(
    doc: &Document,
    partition: &EntityPartition,
    origin: PartitionOrigin,
    cfg: &TypingConfig,
) -> Result<Vec<TypedMention>> {
    let mut out = Vec::with_capacity(partition.mention_count());
    for (span, _) in partition.mentions() {
        let mut types = BTreeSet::new();
        if is_nested(span, partition)? {
            types.insert(MentionType::Nested);
        }
        if is_on_generic(span, doc, cfg) {
            types.insert(MentionType::OnGeneric);
        }
        if is_compound(span, doc, cfg) {
            types.insert(MentionType::Compound);
        }
        if is_copular(span, partition, doc, cfg)? {
            types.insert(MentionType::Copular);
        }
        if is_verb_phrase(span, doc) {
            types.insert(MentionType::VerbPhrase);
        }
        if is_appositive(span, partition, doc, cfg)? {
            types.insert(MentionType::Appositive);
        }
        out.push(TypedMention {
            span,
            head: find_head(span, doc),
            types,
            origin,
        });
    }
    Ok(out)
}

/// One JSON-lines record per typed mention, for audit dumps.
#[derive(Serialize)]
struct TypedMentionRecord<'a> {
    doc_id: &'a str,
    #[serde(flatten)]
    mention: &'a TypedMention,
}

pub fn typed_mentions_to_jsonl(doc_id: &str, mentions: &[TypedMention]) -> Result<String> {
    let mut out = String::new();
    for mention in mentions {
        let record = TypedMentionRecord { doc_id, mention };
        out.push_str(
            &serde_json::to_string(&record)
                .map_err(|e| Error::Internal(format!("JSON encoding failed: {e}")))?,
        );
        out.push('\n');
    }
    Ok(out)
}

/// Bridges a mention type to the metric layer's predicate interface.
pub fn predicate_for(mention_type: MentionType, cfg: &TypingConfig) -> TypePredicate {
    let cfg = cfg.clone();
    TypePredicate::new(
        mention_type.name(),
        move |span, partition, doc| match mention_type {
            MentionType::Nested => is_nested(span, partition).unwrap_or(false),
            MentionType::OnGeneric => is_on_generic(span, doc, &cfg),
            MentionType::Compound => is_compound(span, doc, &cfg),
            MentionType::Copular => is_copular(span, partition, doc, &cfg).unwrap_or(false),
            MentionType::VerbPhrase => is_verb_phrase(span, doc),
            MentionType::Appositive => is_appositive(span, partition, doc, &cfg).unwrap_or(false),
        },
    )
}

/// Predicates for a list of type names.
pub fn predicates_for_names(names: &[String], cfg: &TypingConfig) -> Result<Vec<TypePredicate>> {
    names
        .iter()
        .map(|name| Ok(predicate_for(name.parse()?, cfg)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{align, parse_coref_file, parse_dependency_file, AlignOptions};

    fn doc(coref: &str, deps: &str) -> Document {
        let mut corpus = parse_coref_file(coref, &Default::default()).unwrap().corpus;
        let dep = parse_dependency_file(deps).unwrap();
        align(&mut corpus, &dep, &AlignOptions::default()).unwrap();
        corpus.documents.remove(0)
    }

    fn cfg() -> TypingConfig {
        TypingConfig::default()
    }

    #[test]
    fn head_of_a_farm_is_farm() {
        let d = doc(
            "#begin document (d)\na (0\nfarm 0)\ngrew (0)\n\n#end document\n",
            "1\ta\t_\t_\tDT\t_\t2\tdet\t_\t_\n\
             2\tfarm\t_\t_\tNN\t_\t3\tnsubj\t_\t_\n\
             3\tgrew\t_\t_\tVBD\t_\t0\troot\t_\t_\n",
        );
        assert_eq!(find_head(Span::new(0, 0, 1), &d), (0, 1));
        // Single-token span is its own head.
        assert_eq!(find_head(Span::new(0, 2, 2), &d), (0, 2));
    }

    #[test]
    fn head_tie_break_prefers_internal_attachment() {
        // "the bed itself works": both "the" and "itself" attach to
        // "bed"; only "bed" points outside the span.
        let d = doc(
            "#begin document (d)\nthe (0\nbed -\nitself 0)\nworks (0)\n\n#end document\n",
            "1\tthe\t_\t_\tDT\t_\t2\tdet\t_\t_\n\
             2\tbed\t_\t_\tNN\t_\t4\tnsubj\t_\t_\n\
             3\titself\t_\t_\tPRP\t_\t2\tnmod\t_\t_\n\
             4\tworks\t_\t_\tVBZ\t_\t0\troot\t_\t_\n",
        );
        assert_eq!(find_head(Span::new(0, 0, 2), &d), (0, 1));
    }

    #[test]
    fn nesting_requires_overlap_and_coreference() {
        // "he himself" and "himself" corefer and overlap: both nested.
        let d = doc(
            "#begin document (d)\nhe (0\nhimself (0)|0)\nleft -\n\n#end document\n",
            "1\the\t_\t_\tPRP\t_\t3\tnsubj\t_\t_\n\
             2\thimself\t_\t_\tPRP\t_\t1\tnmod\t_\t_\n\
             3\tleft\t_\t_\tVBD\t_\t0\troot\t_\t_\n",
        );
        let outer = Span::new(0, 0, 1);
        let inner = Span::new(0, 1, 1);
        assert!(is_nested(outer, &d.gold).unwrap());
        assert!(is_nested(inner, &d.gold).unwrap());

        // Disjoint mentions in one cluster are not nested.
        let disjoint =
            EntityPartition::from_clusters(vec![vec![Span::new(0, 0, 0), Span::new(0, 2, 2)]])
                .unwrap();
        assert!(!is_nested(Span::new(0, 0, 0), &disjoint).unwrap());

        // Overlapping mentions in different clusters are not nested.
        let crossing = EntityPartition::from_clusters(vec![
            vec![Span::new(0, 0, 1), Span::new(0, 2, 2)],
            vec![Span::new(0, 1, 1), Span::new(0, 2, 2)],
        ]);
        assert!(crossing.is_err()); // span can't be in two clusters; build differently
        let p = EntityPartition::from_clusters(vec![
            vec![Span::new(0, 0, 1), Span::new(0, 2, 2)],
            vec![Span::new(0, 1, 1)],
        ])
        .unwrap();
        assert!(!is_nested(Span::new(0, 1, 1), &p).unwrap());
    }

    #[test]
    fn mention_outside_partition_is_an_error() {
        let p = EntityPartition::from_clusters(vec![vec![Span::new(0, 0, 0), Span::new(0, 1, 1)]])
            .unwrap();
        assert!(is_nested(Span::new(0, 5, 5), &p).is_err());
    }

    #[test]
    fn generic_via_indefinite_article() {
        let d = doc(
            "#begin document (d)\na (0\ndairy -\nfarm 0)\nthrived (0)\n\n#end document\n",
            "1\ta\t_\t_\tDT\t_\t3\tdet\t_\t_\n\
             2\tdairy\t_\t_\tNN\t_\t3\tcompound:nn\t_\t_\n\
             3\tfarm\t_\t_\tNN\t_\t4\tnsubj\t_\t_\n\
             4\tthrived\t_\t_\tVBD\t_\t0\troot\t_\t_\n",
        );
        assert!(is_on_generic(Span::new(0, 0, 2), &d, &cfg()));
        // "dairy" is a compound modifier inside "a dairy farm".
        assert!(is_compound(Span::new(0, 1, 1), &d, &cfg()));
    }

    #[test]
    fn generic_via_bare_plural_but_not_with_determiner() {
        let d = doc(
            "#begin document (d)\nthe (0\nbridges 0)\nheld -\ntrees (1)\nfell -\ntrees (1)\n\n#end document\n",
            "1\tthe\t_\t_\tDT\t_\t2\tdet\t_\t_\n\
             2\tbridges\t_\t_\tNNS\t_\t3\tnsubj\t_\t_\n\
             3\theld\t_\t_\tVBD\t_\t0\troot\t_\t_\n\
             4\ttrees\t_\t_\tNNS\t_\t5\tnsubj\t_\t_\n\
             5\tfell\t_\t_\tVBD\t_\t3\tconj\t_\t_\n\
             6\ttrees\t_\t_\tNNS\t_\t5\tobj\t_\t_\n",
        );
        // Bare plural: generic.
        assert!(is_on_generic(Span::new(0, 3, 3), &d, &cfg()));
        // Plural with a determiner: blocked.
        assert!(!is_on_generic(Span::new(0, 0, 1), &d, &cfg()));
    }

    #[test]
    fn compound_modifier_requires_the_relation() {
        let d = doc(
            "#begin document (d)\nTaiwan (0)\nauthorities -\nresponded -\nto -\nTaiwan (0)\n\n#end document\n",
            "1\tTaiwan\t_\t_\tNNP\t_\t2\tcompound:nn\t_\t_\n\
             2\tauthorities\t_\t_\tNNS\t_\t3\tnsubj\t_\t_\n\
             3\tresponded\t_\t_\tVBD\t_\t0\troot\t_\t_\n\
             4\tto\t_\t_\tIN\t_\t5\tcase\t_\t_\n\
             5\tTaiwan\t_\t_\tNNP\t_\t3\tobl\t_\t_\n",
        );
        assert!(is_compound(Span::new(0, 0, 0), &d, &cfg()));
        assert!(!is_compound(Span::new(0, 4, 4), &d, &cfg()));
    }

    #[test]
    fn plain_subject_is_not_compound() {
        let d = doc(
            "#begin document (d)\nTaiwan (0)\nacted -\nTaiwan (0)\nwon -\n\n#end document\n",
            "1\tTaiwan\t_\t_\tNNP\t_\t2\tnsubj\t_\t_\n\
             2\tacted\t_\t_\tVBD\t_\t0\troot\t_\t_\n\
             3\tTaiwan\t_\t_\tNNP\t_\t4\tnsubj\t_\t_\n\
             4\twon\t_\t_\tVBD\t_\t2\tconj\t_\t_\n",
        );
        assert!(!is_compound(Span::new(0, 0, 0), &d, &cfg()));
    }

    #[test]
    fn copular_pair_is_symmetric_and_needs_coreference() {
        // "I will always be his little girl": subject "I", predicate
        // "his little girl" headed by "girl" governing the copula "be".
        let text = "#begin document (d)\nI (0)\nwill -\nalways -\nbe -\nhis (0\nlittle -\ngirl 0)\n\n#end document\n";
        let deps = "1\tI\t_\t_\tPRP\t_\t7\tnsubj\t_\t_\n\
                    2\twill\t_\t_\tMD\t_\t7\taux\t_\t_\n\
                    3\talways\t_\t_\tRB\t_\t7\tadvmod\t_\t_\n\
                    4\tbe\t_\t_\tVB\t_\t7\tcop\t_\t_\n\
                    5\this\t_\t_\tPRP$\t_\t7\tnmod:poss\t_\t_\n\
                    6\tlittle\t_\t_\tJJ\t_\t7\tamod\t_\t_\n\
                    7\tgirl\t_\t_\tNN\t_\t0\troot\t_\t_\n";
        let d = doc(text, deps);
        let subject = Span::new(0, 0, 0);
        let predicate = Span::new(0, 4, 6);
        assert!(is_copular(subject, &d.gold, &d, &cfg()).unwrap());
        assert!(is_copular(predicate, &d.gold, &d, &cfg()).unwrap());

        // Same syntax, different clusters: not copular.
        let split = EntityPartition::from_clusters(vec![
            vec![subject, Span::new(0, 1, 1)],
            vec![predicate, Span::new(0, 2, 2)],
        ])
        .unwrap();
        assert!(!is_copular(subject, &split, &d, &cfg()).unwrap());
    }

    #[test]
    fn verb_phrase_needs_all_verbal_tags() {
        let d = doc(
            "#begin document (d)\nit -\nwill -\ngrow (0)\nagain -\ngrow (0)\n\n#end document\n",
            "1\tit\t_\t_\tPRP\t_\t3\tnsubj\t_\t_\n\
             2\twill\t_\t_\tMD\t_\t3\taux\t_\t_\n\
             3\tgrow\t_\t_\tVB\t_\t0\troot\t_\t_\n\
             4\tagain\t_\t_\tRB\t_\t5\tadvmod\t_\t_\n\
             5\tgrow\t_\t_\tVB\t_\t3\tconj\t_\t_\n",
        );
        assert!(is_verb_phrase(Span::new(0, 2, 2), &d));
        assert!(!is_verb_phrase(Span::new(0, 0, 2), &d));
    }

    #[test]
    fn appositive_allows_one_punctuation_separator() {
        let d = doc(
            "#begin document (d)\nAbe (0)\n, -\nthe (0\nchef 0)\ncooked -\n\n#end document\n",
            "1\tAbe\t_\t_\tNNP\t_\t5\tnsubj\t_\t_\n\
             2\t,\t_\t_\t,\t_\t1\tpunct\t_\t_\n\
             3\tthe\t_\t_\tDT\t_\t4\tdet\t_\t_\n\
             4\tchef\t_\t_\tNN\t_\t1\tappos\t_\t_\n\
             5\tcooked\t_\t_\tVBD\t_\t0\troot\t_\t_\n",
        );
        assert!(is_appositive(Span::new(0, 0, 0), &d.gold, &d, &cfg()).unwrap());
        assert!(is_appositive(Span::new(0, 2, 3), &d.gold, &d, &cfg()).unwrap());
    }

    #[test]
    fn appositive_rejects_distance_and_non_coreference() {
        // Same pair two sentences apart.
        let far = doc(
            "#begin document (d)\nAbe (0)\nleft -\n\nthe (0\nchef 0)\nstayed -\n\n#end document\n",
            "1\tAbe\t_\t_\tNNP\t_\t2\tnsubj\t_\t_\n\
             2\tleft\t_\t_\tVBD\t_\t0\troot\t_\t_\n\n\
             1\tthe\t_\t_\tDT\t_\t2\tdet\t_\t_\n\
             2\tchef\t_\t_\tNN\t_\t3\tnsubj\t_\t_\n\
             3\tstayed\t_\t_\tVBD\t_\t0\troot\t_\t_\n",
        );
        assert!(!is_appositive(Span::new(0, 0, 0), &far.gold, &far, &cfg()).unwrap());

        // Adjacent but non-coreferring.
        let adjacent = doc(
            "#begin document (d)\nAbe (0)\nchefs (1)\ncook -\nAbe (0)\nchefs (1)\n\n#end document\n",
            "1\tAbe\t_\t_\tNNP\t_\t3\tnsubj\t_\t_\n\
             2\tchefs\t_\t_\tNNS\t_\t1\tappos\t_\t_\n\
             3\tcook\t_\t_\tVBP\t_\t0\troot\t_\t_\n\
             4\tAbe\t_\t_\tNNP\t_\t3\tobj\t_\t_\n\
             5\tchefs\t_\t_\tNNS\t_\t4\tappos\t_\t_\n",
        );
        assert!(!is_appositive(Span::new(0, 0, 0), &adjacent.gold, &adjacent, &cfg()).unwrap());
    }

    #[test]
    fn type_all_on_empty_partition_is_empty() {
        let d = doc(
            "#begin document (d)\nwords -\n\n#end document\n",
            "1\twords\t_\t_\tNNS\t_\t0\troot\t_\t_\n",
        );
        let typed = type_all(&d, &d.gold, PartitionOrigin::Gold, &cfg()).unwrap();
        assert!(typed.is_empty());
    }

    #[test]
    fn removing_a_cluster_only_turns_relation_types_off() {
        let d = doc(
            "#begin document (d)\nAbe (0)\n, -\nthe (0\nchef 0)\ncooked -\nAbe (1)\nagain (1)\n\n#end document\n",
            "1\tAbe\t_\t_\tNNP\t_\t5\tnsubj\t_\t_\n\
             2\t,\t_\t_\t,\t_\t1\tpunct\t_\t_\n\
             3\tthe\t_\t_\tDT\t_\t4\tdet\t_\t_\n\
             4\tchef\t_\t_\tNN\t_\t1\tappos\t_\t_\n\
             5\tcooked\t_\t_\tVBD\t_\t0\troot\t_\t_\n\
             6\tAbe\t_\t_\tNNP\t_\t5\tobj\t_\t_\n\
             7\tagain\t_\t_\tRB\t_\t5\tadvmod\t_\t_\n",
        );
        let full = type_all(&d, &d.gold, PartitionOrigin::Gold, &cfg()).unwrap();
        let reduced_partition =
            EntityPartition::from_clusters(vec![d.gold.cluster_spans(1).to_vec()]).unwrap();
        let reduced = type_all(&d, &reduced_partition, PartitionOrigin::Gold, &cfg()).unwrap();
        for tm in &reduced {
            let before = full.iter().find(|f| f.span == tm.span).unwrap();
            // Monotone: no type may appear that was absent with the
            // larger partition.
            assert!(tm.types.is_subset(&before.types));
        }
    }

    /// Six gold mentions, two of them nested, the system recovering one.
    /// Typed recall summands by hand: the recovered nested mention shares
    /// 2 of its 3-mention gold cluster with its predicted cluster (2/3);
    /// the missed one contributes 0; support is 2, so R = 1/3. The
    /// predicted partition contains no nested mention, so precision is
    /// undefined and F1 collapses to flagged 0.
    #[test]
    fn typed_recall_summands_match_hand_enumeration() {
        use crate::metrics::b_cubed_typed;
        let gold = EntityPartition::from_clusters(vec![
            vec![Span::new(0, 0, 1), Span::new(0, 1, 1), Span::new(0, 3, 3)],
            vec![Span::new(0, 4, 4), Span::new(0, 5, 5), Span::new(0, 6, 6)],
        ])
        .unwrap();
        let pred = EntityPartition::from_clusters(vec![
            vec![Span::new(0, 0, 1), Span::new(0, 3, 3)],
            vec![Span::new(0, 4, 4), Span::new(0, 5, 5), Span::new(0, 6, 6)],
        ])
        .unwrap();
        let doc = Document {
            doc_id: "hand".into(),
            sentences: vec![(0..8)
                .map(|i| crate::types::Token::bare(format!("w{i}")))
                .collect()],
            gold: gold.clone(),
        };
        let predicate = predicate_for(MentionType::Nested, &cfg());
        let t = b_cubed_typed(&gold, &pred, &predicate, &doc);
        assert_eq!(t.support_gold, 2);
        assert!((t.recall.unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(t.support_pred, 0);
        assert_eq!(t.precision, None);
        assert_eq!(t.f1, Some(0.0));
        assert!(t.f1_one_sided);
    }

    #[test]
    fn predicates_do_not_mutate_their_inputs() {
        let d = doc(
            "#begin document (d)\nAbe (0)\n, -\nthe (0\nchef 0)\ncooked -\n\n#end document\n",
            "1\tAbe\t_\t_\tNNP\t_\t5\tnsubj\t_\t_\n\
             2\t,\t_\t_\t,\t_\t1\tpunct\t_\t_\n\
             3\tthe\t_\t_\tDT\t_\t4\tdet\t_\t_\n\
             4\tchef\t_\t_\tNN\t_\t1\tappos\t_\t_\n\
             5\tcooked\t_\t_\tVBD\t_\t0\troot\t_\t_\n",
        );
        let before = d.clone();
        let _ = type_all(&d, &d.gold, PartitionOrigin::Gold, &cfg()).unwrap();
        let again = type_all(&d, &d.gold, PartitionOrigin::Gold, &cfg()).unwrap();
        assert_eq!(d, before);
        assert_eq!(
            again,
            type_all(&d, &d.gold, PartitionOrigin::Gold, &cfg()).unwrap()
        );
    }
}
