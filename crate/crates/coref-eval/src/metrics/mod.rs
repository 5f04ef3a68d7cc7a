//! Cluster-agreement metrics between gold and predicted entity partitions.
//!
//! All metrics report recall, precision, and F1 together with the raw
//! numerator/denominator pairs so that corpus-level scores can be formed
//! by micro-aggregation (summing counts across documents, then dividing).

mod matching;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::types::{Document, EntityPartition, Span};

pub use matching::max_weight_assignment;

/// Which cluster-agreement metric a score belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    BCubed,
    Muc,
    CeafE,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::BCubed, Metric::Muc, Metric::CeafE];

    pub fn name(self) -> &'static str {
        match self {
            Metric::BCubed => "b_cubed",
            Metric::Muc => "muc",
            Metric::CeafE => "ceaf_e",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Metric {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "b_cubed" | "b3" | "bcubed" => Ok(Metric::BCubed),
            "muc" => Ok(Metric::Muc),
            "ceaf_e" | "ceafe" | "ceaf" => Ok(Metric::CeafE),
            other => Err(crate::Error::Config(format!("unknown metric '{other}'"))),
        }
    }
}

impl Serialize for Metric {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Metric {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Evaluation slice: the whole mention set or one mention type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scope {
    All,
    Type(String),
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::All => f.write_str("all"),
            Scope::Type(t) => f.write_str(t),
        }
    }
}

/// Key for one (metric, scope) score slot, serialized as `metric` or
/// `metric@type`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ScoreKey {
    pub metric: Metric,
    pub scope: Scope,
}

impl ScoreKey {
    pub fn all(metric: Metric) -> Self {
        ScoreKey {
            metric,
            scope: Scope::All,
        }
    }

    pub fn typed(metric: Metric, type_name: impl Into<String>) -> Self {
        ScoreKey {
            metric,
            scope: Scope::Type(type_name.into()),
        }
    }
}

impl fmt::Display for ScoreKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.scope {
            Scope::All => write!(f, "{}", self.metric),
            Scope::Type(t) => write!(f, "{}@{}", self.metric, t),
        }
    }
}

impl std::str::FromStr for ScoreKey {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s.split_once('@') {
            Some((m, t)) => Ok(ScoreKey::typed(m.parse::<Metric>()?, t)),
            None => Ok(ScoreKey::all(s.parse::<Metric>()?)),
        }
    }
}

impl Serialize for ScoreKey {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ScoreKey {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Numerator/denominator pairs for one metric on one document (or summed
/// over documents). Corpus aggregation is micro: merge counts, then score.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PairCounts {
    pub recall_num: f64,
    pub recall_den: f64,
    pub precision_num: f64,
    pub precision_den: f64,
}

impl PairCounts {
    pub fn merge(&mut self, other: &PairCounts) {
        self.recall_num += other.recall_num;
        self.recall_den += other.recall_den;
        self.precision_num += other.precision_num;
        self.precision_den += other.precision_den;
    }

    pub fn score(&self) -> ScoreTriple {
        ScoreTriple::from_counts(self)
    }
}

/// Recall, precision, and F1 for one metric on one evaluation slice.
///
/// A side with an empty summation domain is undefined and carried as
/// `None` (rendered blank, never conflated with 0.0). F1 is the harmonic
/// mean when both sides are defined; when exactly one side is defined it
/// is reported as 0.0 with `f1_one_sided` set.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ScoreTriple {
    pub recall: Option<f64>,
    pub precision: Option<f64>,
    pub f1: Option<f64>,
    pub f1_one_sided: bool,
    pub support_gold: usize,
    pub support_pred: usize,
}

impl ScoreTriple {
    pub fn from_counts(c: &PairCounts) -> Self {
        let recall = (c.recall_den > 0.0).then(|| c.recall_num / c.recall_den);
        let precision = (c.precision_den > 0.0).then(|| c.precision_num / c.precision_den);
        let (f1, f1_one_sided) = match (recall, precision) {
            (Some(r), Some(p)) => {
                let f1 = if r + p > 0.0 {
                    2.0 * r * p / (r + p)
                } else {
                    0.0
                };
                (Some(f1), false)
            }
            (None, None) => (None, false),
            _ => (Some(0.0), true),
        };
        ScoreTriple {
            recall,
            precision,
            f1,
            f1_one_sided,
            support_gold: c.recall_den.round() as usize,
            support_pred: c.precision_den.round() as usize,
        }
    }

    /// Composite of several metrics: arithmetic means of each component,
    /// undefined if any input component is undefined. Used for the
    /// averaged aggregate score; the harmonic relation between the fields
    /// does not hold here.
    pub fn mean_of(triples: &[&ScoreTriple]) -> ScoreTriple {
        let mean = |get: fn(&ScoreTriple) -> Option<f64>| -> Option<f64> {
            let mut sum = 0.0;
            for t in triples {
                sum += get(t)?;
            }
            Some(sum / triples.len() as f64)
        };
        ScoreTriple {
            recall: mean(|t| t.recall),
            precision: mean(|t| t.precision),
            f1: mean(|t| t.f1),
            f1_one_sided: false,
            support_gold: 0,
            support_pred: 0,
        }
    }
}

/// The test function backing a [`TypePredicate`].
pub type PredicateFn = dyn Fn(Span, &EntityPartition, &Document) -> bool + Send + Sync;

/// A named, pure test deciding whether a mention belongs to one
/// coreference type. The partition argument is the partition the mention
/// belongs to (gold when scoring recall, predicted when scoring
/// precision), so relation-dependent types bind to the correct side.
#[derive(Clone)]
pub struct TypePredicate {
    name: String,
    test: Arc<PredicateFn>,
}

impl TypePredicate {
    pub fn new(
        name: impl Into<String>,
        test: impl Fn(Span, &EntityPartition, &Document) -> bool + Send + Sync + 'static,
    ) -> Self {
        TypePredicate {
            name: name.into(),
            test: Arc::new(test),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn matches(&self, span: Span, partition: &EntityPartition, doc: &Document) -> bool {
        (self.test)(span, partition, doc)
    }

    /// Matches every mention; restricting with it reproduces the
    /// unrestricted metric exactly.
    pub fn always_true() -> Self {
        TypePredicate::new("all", |_, _, _| true)
    }
}

impl fmt::Debug for TypePredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TypePredicate")
            .field("name", &self.name)
            .finish()
    }
}

/// Cluster-overlap sizes between every (gold, predicted) cluster pair that
/// shares at least one mention.
fn intersection_counts(
    gold: &EntityPartition,
    pred: &EntityPartition,
) -> std::collections::HashMap<(usize, usize), usize> {
    let mut counts = std::collections::HashMap::new();
    for (span, gid) in gold.mentions() {
        if let Some(pid) = pred.cluster_of(&span) {
            *counts.entry((gid, pid)).or_insert(0) += 1;
        }
    }
    counts
}

/// Shared summation core for the mention-averaged metric. `filter`
/// restricts which mentions are summed over; the unrestricted metric uses
/// no filter and performs the identical arithmetic, so the restricted
/// metric with an always-true predicate is bit-for-bit equal to it.
fn b_cubed_counts_impl(
    gold: &EntityPartition,
    pred: &EntityPartition,
    filter: Option<(&TypePredicate, &Document)>,
) -> PairCounts {
    let overlap = intersection_counts(gold, pred);
    let mut counts = PairCounts::default();
    for (span, gid) in gold.mentions() {
        if let Some((predicate, doc)) = filter {
            if !predicate.matches(span, gold, doc) {
                continue;
            }
        }
        counts.recall_den += 1.0;
        if let Some(pid) = pred.cluster_of(&span) {
            let inter = overlap[&(gid, pid)] as f64;
            counts.recall_num += inter / gold.cluster_spans(gid).len() as f64;
        }
    }
    for (span, pid) in pred.mentions() {
        if let Some((predicate, doc)) = filter {
            if !predicate.matches(span, pred, doc) {
                continue;
            }
        }
        counts.precision_den += 1.0;
        if let Some(gid) = gold.cluster_of(&span) {
            let inter = overlap[&(gid, pid)] as f64;
            counts.precision_num += inter / pred.cluster_spans(pid).len() as f64;
        }
    }
    counts
}

/// Mention-averaged agreement: for each gold mention, the fraction of its
/// gold cluster recovered in its predicted cluster (recall), and
/// symmetrically for predicted mentions (precision). Mentions absent from
/// the other partition contribute zero to the numerator.
pub fn b_cubed_counts(gold: &EntityPartition, pred: &EntityPartition) -> PairCounts {
    b_cubed_counts_impl(gold, pred, None)
}

pub fn b_cubed(gold: &EntityPartition, pred: &EntityPartition) -> ScoreTriple {
    b_cubed_counts(gold, pred).score()
}

/// Type-restricted variant: recall sums only over gold mentions matching
/// the predicate evaluated against the gold partition; precision sums only
/// over predicted mentions matching it against the predicted partition.
/// Summands are unchanged.
pub fn b_cubed_typed_counts(
    gold: &EntityPartition,
    pred: &EntityPartition,
    predicate: &TypePredicate,
    doc: &Document,
) -> PairCounts {
    b_cubed_counts_impl(gold, pred, Some((predicate, doc)))
}

pub fn b_cubed_typed(
    gold: &EntityPartition,
    pred: &EntityPartition,
    predicate: &TypePredicate,
    doc: &Document,
) -> ScoreTriple {
    b_cubed_typed_counts(gold, pred, predicate, doc).score()
}

fn muc_side(base: &EntityPartition, other: &EntityPartition) -> (f64, f64) {
    let mut num = 0.0;
    let mut den = 0.0;
    for cluster in base.clusters() {
        let mut partitions = 0usize;
        let mut seen = std::collections::BTreeSet::new();
        for span in cluster {
            match other.cluster_of(span) {
                Some(id) => {
                    if seen.insert(id) {
                        partitions += 1;
                    }
                }
                // A mention missing from the other partition forms its
                // own partition.
                None => partitions += 1,
            }
        }
        num += (cluster.len() - partitions) as f64;
        den += (cluster.len() - 1) as f64;
    }
    (num, den)
}

/// Link-based agreement: how many coreference links survive, where a gold
/// cluster cut into `p` pieces by the prediction retains `|E| - p` of its
/// `|E| - 1` links.
pub fn muc_counts(gold: &EntityPartition, pred: &EntityPartition) -> PairCounts {
    let (recall_num, recall_den) = muc_side(gold, pred);
    let (precision_num, precision_den) = muc_side(pred, gold);
    PairCounts {
        recall_num,
        recall_den,
        precision_num,
        precision_den,
    }
}

pub fn muc(gold: &EntityPartition, pred: &EntityPartition) -> ScoreTriple {
    muc_counts(gold, pred).score()
}

/// Entity-based agreement under the optimal one-to-one cluster alignment,
/// with pairwise similarity `2|E ∩ E'| / (|E| + |E'|)`. Recall divides the
/// matched similarity total by the gold cluster count, precision by the
/// predicted cluster count.
pub fn ceaf_e_counts(gold: &EntityPartition, pred: &EntityPartition) -> PairCounts {
    let k = gold.cluster_count();
    let l = pred.cluster_count();
    let total = if k == 0 || l == 0 {
        0.0
    } else {
        let overlap = intersection_counts(gold, pred);
        let mut weights = vec![vec![0.0f64; l]; k];
        for ((gid, pid), inter) in &overlap {
            let denom = (gold.cluster_spans(*gid).len() + pred.cluster_spans(*pid).len()) as f64;
            weights[*gid][*pid] = 2.0 * *inter as f64 / denom;
        }
        max_weight_assignment(&weights)
    };
    PairCounts {
        recall_num: total,
        recall_den: k as f64,
        precision_num: total,
        precision_den: l as f64,
    }
}

pub fn ceaf_e(gold: &EntityPartition, pred: &EntityPartition) -> ScoreTriple {
    ceaf_e_counts(gold, pred).score()
}

/// Arithmetic mean of the three component F1s; undefined if any component
/// is undefined.
pub fn conll_f1_from(
    b_cubed: &ScoreTriple,
    muc: &ScoreTriple,
    ceaf_e: &ScoreTriple,
) -> Option<f64> {
    Some((b_cubed.f1? + muc.f1? + ceaf_e.f1?) / 3.0)
}

/// Single-partition-pair convenience for the averaged score.
pub fn conll_f1(gold: &EntityPartition, pred: &EntityPartition) -> Option<f64> {
    conll_f1_from(&b_cubed(gold, pred), &muc(gold, pred), &ceaf_e(gold, pred))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Token;

    fn span(start: usize) -> Span {
        Span::new(0, start, start)
    }

    fn partition(clusters: &[&[usize]]) -> EntityPartition {
        EntityPartition::from_clusters(
            clusters
                .iter()
                .map(|c| c.iter().map(|&i| span(i)).collect())
                .collect(),
        )
        .unwrap()
    }

    fn dummy_doc(n_tokens: usize, gold: &EntityPartition) -> Document {
        Document {
            doc_id: "dummy".into(),
            sentences: vec![(0..n_tokens)
                .map(|i| Token::bare(format!("w{i}")))
                .collect()],
            gold: gold.clone(),
        }
    }

    #[test]
    fn b_cubed_identity_is_perfect() {
        let gold = partition(&[&[0, 1], &[2, 3]]);
        let t = b_cubed(&gold, &gold);
        assert_eq!(t.recall, Some(1.0));
        assert_eq!(t.precision, Some(1.0));
        assert_eq!(t.f1, Some(1.0));
        assert_eq!(t.support_gold, 4);
    }

    #[test]
    fn b_cubed_over_merged_prediction() {
        // gold {{a,b},{c,d}}, pred {{a,b,c,d}}: every gold mention fully
        // recovered (R=1); each predicted mention shares its 4-cluster
        // with only its 2-cluster gold partner (P=2/4).
        let gold = partition(&[&[0, 1], &[2, 3]]);
        let pred = partition(&[&[0, 1, 2, 3]]);
        let t = b_cubed(&gold, &pred);
        assert_eq!(t.recall, Some(1.0));
        assert_eq!(t.precision, Some(0.5));
        assert!((t.f1.unwrap() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn b_cubed_with_unpredicted_mentions() {
        // Unpredicted gold mentions contribute zero recall summands and
        // are absent from the precision sum.
        let gold = partition(&[&[0, 1], &[2, 3]]);
        let pred = partition(&[&[0, 1]]);
        let t = b_cubed(&gold, &pred);
        assert_eq!(t.recall, Some(0.5));
        assert_eq!(t.precision, Some(1.0));
        assert!((t.f1.unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(t.support_gold, 4);
        assert_eq!(t.support_pred, 2);
    }

    #[test]
    fn b_cubed_empty_gold_is_undefined_not_zero() {
        let gold = EntityPartition::empty();
        let pred = partition(&[&[0, 1]]);
        let t = b_cubed(&gold, &pred);
        assert_eq!(t.recall, None);
        assert_eq!(t.support_gold, 0);
        assert_eq!(t.precision, Some(0.0));
        assert_eq!(t.f1, Some(0.0));
        assert!(t.f1_one_sided);
    }

    #[test]
    fn typed_with_always_true_is_bit_for_bit_equal() {
        let gold = partition(&[&[0, 1], &[2, 3, 5]]);
        let pred = partition(&[&[0, 1, 2], &[3, 5]]);
        let doc = dummy_doc(6, &gold);
        let plain = b_cubed(&gold, &pred);
        let typed = b_cubed_typed(&gold, &pred, &TypePredicate::always_true(), &doc);
        assert_eq!(
            plain.recall.unwrap().to_bits(),
            typed.recall.unwrap().to_bits()
        );
        assert_eq!(
            plain.precision.unwrap().to_bits(),
            typed.precision.unwrap().to_bits()
        );
        assert_eq!(plain.f1.unwrap().to_bits(), typed.f1.unwrap().to_bits());
    }

    #[test]
    fn typed_with_always_false_is_undefined() {
        let gold = partition(&[&[0, 1]]);
        let pred = partition(&[&[0, 1]]);
        let doc = dummy_doc(2, &gold);
        let never = TypePredicate::new("never", |_, _, _| false);
        let t = b_cubed_typed(&gold, &pred, &never, &doc);
        assert_eq!(t.recall, None);
        assert_eq!(t.precision, None);
        assert_eq!(t.f1, None);
        assert_eq!(t.support_gold, 0);
        assert_eq!(t.support_pred, 0);
    }

    #[test]
    fn muc_identity_and_split_cluster() {
        let gold = partition(&[&[0, 1, 2]]);
        let t = muc(&gold, &gold);
        assert_eq!(t.f1, Some(1.0));

        // gold {{a,b,c}}, pred {{a,b},{c,d}}: the gold cluster is cut in
        // two, keeping 1 of 2 links.
        let pred = partition(&[&[0, 1], &[2, 3]]);
        let t = muc(&gold, &pred);
        assert_eq!(t.recall, Some(0.5));
        assert_eq!(t.precision, Some(0.5));
    }

    #[test]
    fn muc_disjoint_predictions_score_zero_recall() {
        let gold = partition(&[&[0, 1]]);
        let pred = partition(&[&[2, 3]]);
        let t = muc(&gold, &pred);
        assert_eq!(t.recall, Some(0.0));
    }

    #[test]
    fn ceaf_single_pair_similarity() {
        // phi4({a,b},{a,c}) = 2*1/4.
        let gold = partition(&[&[0, 1]]);
        let pred = partition(&[&[0, 2]]);
        let t = ceaf_e(&gold, &pred);
        assert_eq!(t.recall, Some(0.5));
        assert_eq!(t.precision, Some(0.5));
        assert_eq!(t.f1, Some(0.5));
    }

    #[test]
    fn ceaf_empty_prediction_is_one_sided() {
        let gold = partition(&[&[0, 1]]);
        let pred = EntityPartition::empty();
        let t = ceaf_e(&gold, &pred);
        assert_eq!(t.recall, Some(0.0));
        assert_eq!(t.precision, None);
        assert_eq!(t.f1, Some(0.0));
        assert!(t.f1_one_sided);
    }

    #[test]
    fn conll_is_the_mean_of_component_f1s() {
        let gold = partition(&[&[0, 1], &[2, 3]]);
        assert_eq!(conll_f1(&gold, &gold), Some(1.0));

        let mk = |f1: f64| ScoreTriple {
            recall: Some(f1),
            precision: Some(f1),
            f1: Some(f1),
            f1_one_sided: false,
            support_gold: 1,
            support_pred: 1,
        };
        assert_eq!(conll_f1_from(&mk(0.6), &mk(0.6), &mk(0.6)), Some(0.6));
        let undefined = ScoreTriple::default();
        assert_eq!(conll_f1_from(&mk(0.6), &undefined, &mk(0.6)), None);
    }

    #[test]
    fn metric_values_invariant_under_cluster_relabeling() {
        let gold = partition(&[&[0, 1, 2], &[3, 4]]);
        let pred = partition(&[&[0, 1], &[2, 3], &[4, 5]]);
        let pred_relabeled = partition(&[&[4, 5], &[0, 1], &[2, 3]]);
        for f in [b_cubed, muc, ceaf_e] {
            let a = f(&gold, &pred);
            let b = f(&gold, &pred_relabeled);
            assert_eq!(a.recall, b.recall);
            assert_eq!(a.precision, b.precision);
            assert_eq!(a.f1, b.f1);
        }
    }

    #[test]
    fn adding_a_correct_mention_never_decreases_b_cubed_recall() {
        let gold = partition(&[&[0, 1, 2], &[3, 4]]);
        let before = partition(&[&[0, 1]]);
        let after = partition(&[&[0, 1, 2]]);
        let r0 = b_cubed(&gold, &before).recall.unwrap();
        let r1 = b_cubed(&gold, &after).recall.unwrap();
        assert!(r1 >= r0);
    }

    #[test]
    fn score_keys_round_trip_as_strings() {
        let keys = [
            ScoreKey::all(Metric::BCubed),
            ScoreKey::typed(Metric::BCubed, "nested"),
            ScoreKey::all(Metric::CeafE),
        ];
        for key in keys {
            let s = key.to_string();
            let back: ScoreKey = s.parse().unwrap();
            assert_eq!(back, key);
        }
    }
}
