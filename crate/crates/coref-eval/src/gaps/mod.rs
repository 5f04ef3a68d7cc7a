//! Generalization gaps between an in-domain and an out-of-domain run,
//! with document-level permutation significance testing.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{Metric, PairCounts, ScoreKey, ScoreTriple};

/// Per-document numerator/denominator records for every scored
/// (metric, scope) slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentScores {
    pub doc_id: String,
    pub counts: BTreeMap<ScoreKey, PairCounts>,
}

/// One model evaluated on one test corpus: per-document score records and
/// their micro-aggregated corpus scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRun {
    pub model_id: String,
    pub test_set: String,
    pub per_document_scores: Vec<DocumentScores>,
    pub corpus_scores: BTreeMap<ScoreKey, ScoreTriple>,
}

impl ModelRun {
    /// Builds a run from per-document records; corpus scores are exactly
    /// their micro-aggregation.
    pub fn from_document_scores(
        model_id: impl Into<String>,
        test_set: impl Into<String>,
        mut docs: Vec<DocumentScores>,
    ) -> Self {
        docs.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
        let corpus_scores = aggregate(&docs);
        ModelRun {
            model_id: model_id.into(),
            test_set: test_set.into(),
            per_document_scores: docs,
            corpus_scores,
        }
    }

    /// Builds a run that carries only recorded corpus-level F1 values
    /// (fractions), e.g. transcribed from published result tables. Such
    /// runs support gap computation but not permutation testing.
    pub fn from_recorded_f1(
        model_id: impl Into<String>,
        test_set: impl Into<String>,
        f1_by_key: BTreeMap<ScoreKey, f64>,
    ) -> Self {
        let corpus_scores = f1_by_key
            .into_iter()
            .map(|(key, f1)| {
                (
                    key,
                    ScoreTriple {
                        recall: None,
                        precision: None,
                        f1: Some(f1),
                        f1_one_sided: false,
                        support_gold: 0,
                        support_pred: 0,
                    },
                )
            })
            .collect();
        ModelRun {
            model_id: model_id.into(),
            test_set: test_set.into(),
            per_document_scores: Vec::new(),
            corpus_scores,
        }
    }

    /// Re-derives corpus scores from the per-document records
    /// (aggregation-consistency check).
    pub fn recompute_corpus_scores(&self) -> BTreeMap<ScoreKey, ScoreTriple> {
        aggregate(&self.per_document_scores)
    }

    /// Corpus-level F1 for the gap metric.
    pub fn corpus_f1(&self, metric: GapMetric) -> Option<f64> {
        match metric {
            GapMetric::BCubed => self.corpus_scores.get(&ScoreKey::all(Metric::BCubed))?.f1,
            GapMetric::Conll => {
                let f = |m: Metric| self.corpus_scores.get(&ScoreKey::all(m))?.f1;
                Some((f(Metric::BCubed)? + f(Metric::Muc)? + f(Metric::CeafE)?) / 3.0)
            }
        }
    }

    /// Corpus-level type-restricted F1 (mention-averaged metric).
    pub fn typed_f1(&self, type_name: &str) -> Option<f64> {
        self.corpus_scores
            .get(&ScoreKey::typed(Metric::BCubed, type_name))?
            .f1
    }

    pub fn doc_ids(&self) -> Vec<&str> {
        self.per_document_scores
            .iter()
            .map(|d| d.doc_id.as_str())
            .collect()
    }
}

fn aggregate(docs: &[DocumentScores]) -> BTreeMap<ScoreKey, ScoreTriple> {
    let mut totals: BTreeMap<ScoreKey, PairCounts> = BTreeMap::new();
    for doc in docs {
        for (key, counts) in &doc.counts {
            totals.entry(key.clone()).or_default().merge(counts);
        }
    }
    totals.into_iter().map(|(k, c)| (k, c.score())).collect()
}

/// Metric the gaps (and the permutation statistic) are computed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GapMetric {
    #[default]
    BCubed,
    Conll,
}

impl std::str::FromStr for GapMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "b_cubed" | "b3" | "bcubed" => Ok(GapMetric::BCubed),
            "conll" => Ok(GapMetric::Conll),
            other => Err(Error::Config(format!("unknown gap metric '{other}'"))),
        }
    }
}

/// Absolute difference between in-domain and out-of-domain scores on the
/// full mention set. Undefined inputs give an undefined gap.
pub fn aggregate_gap(f_in: Option<f64>, f_out: Option<f64>) -> Option<f64> {
    Some((f_in? - f_out?).abs())
}

/// The same gap restricted to one coreference type.
pub fn type_gap(f_in_t: Option<f64>, f_out_t: Option<f64>) -> Option<f64> {
    aggregate_gap(f_in_t, f_out_t)
}

/// Permutation test parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SignificanceParams {
    pub n_perms: usize,
    pub alpha: f64,
    pub seed: u64,
}

impl Default for SignificanceParams {
    fn default() -> Self {
        SignificanceParams {
            n_perms: 10_000,
            alpha: 0.1,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PermutationOutcome {
    pub observed: f64,
    pub p_value: f64,
    pub significant: bool,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based per-permutation seed: permutation `i` always sees the
/// same substream regardless of evaluation order, so parallel runs
/// reproduce the sequential p-value exactly.
fn substream_seed(seed: u64, index: usize) -> u64 {
    splitmix64(seed ^ splitmix64(index as u64))
}

fn f1_of_totals(totals: &BTreeMap<Metric, PairCounts>, metric: GapMetric) -> Option<f64> {
    let f1 = |m: Metric| totals[&m].score().f1;
    match metric {
        GapMetric::BCubed => f1(Metric::BCubed),
        GapMetric::Conll => {
            Some((f1(Metric::BCubed)? + f1(Metric::Muc)? + f1(Metric::CeafE)?) / 3.0)
        }
    }
}

/// The test statistic: type gap minus aggregate gap for one swap
/// assignment of per-document records between the two runs. `None` when
/// the typed slice has no defined score on either side.
pub fn swap_delta(
    in_docs: &[DocumentScores],
    out_docs: &[DocumentScores],
    type_name: &str,
    metric: GapMetric,
    swap: impl Fn(usize) -> bool,
) -> Option<f64> {
    let typed_key = ScoreKey::typed(Metric::BCubed, type_name);
    let mut in_aggregate: BTreeMap<Metric, PairCounts> = BTreeMap::new();
    let mut out_aggregate: BTreeMap<Metric, PairCounts> = BTreeMap::new();
    let mut in_typed = PairCounts::default();
    let mut out_typed = PairCounts::default();
    for m in [Metric::BCubed, Metric::Muc, Metric::CeafE] {
        in_aggregate.insert(m, PairCounts::default());
        out_aggregate.insert(m, PairCounts::default());
    }

    for (i, (a, b)) in in_docs.iter().zip(out_docs).enumerate() {
        let (first, second) = if swap(i) { (b, a) } else { (a, b) };
        for m in [Metric::BCubed, Metric::Muc, Metric::CeafE] {
            let key = ScoreKey::all(m);
            if let Some(c) = first.counts.get(&key) {
                in_aggregate.get_mut(&m).unwrap().merge(c);
            }
            if let Some(c) = second.counts.get(&key) {
                out_aggregate.get_mut(&m).unwrap().merge(c);
            }
        }
        if let Some(c) = first.counts.get(&typed_key) {
            in_typed.merge(c);
        }
        if let Some(c) = second.counts.get(&typed_key) {
            out_typed.merge(c);
        }
    }

    let in_typed_f1 = in_typed.score().f1?;
    let out_typed_f1 = out_typed.score().f1?;
    let tgg = (in_typed_f1 - out_typed_f1).abs();
    let agg = (f1_of_totals(&in_aggregate, metric)? - f1_of_totals(&out_aggregate, metric)?).abs();
    Some(tgg - agg)
}

/// Observed statistic without any swaps.
pub fn observed_delta(
    in_run: &ModelRun,
    out_run: &ModelRun,
    type_name: &str,
    metric: GapMetric,
) -> Option<f64> {
    let tgg = type_gap(in_run.typed_f1(type_name), out_run.typed_f1(type_name))?;
    let agg = aggregate_gap(in_run.corpus_f1(metric), out_run.corpus_f1(metric))?;
    Some(tgg - agg)
}

/// One-sided permutation test of whether the type gap exceeds the
/// aggregate gap. Each document independently swaps its per-document
/// records between the runs with probability 1/2; the add-one estimator
/// `p = (1 + #{Δ* ≥ Δ}) / (1 + n_perms)` avoids p = 0. Deterministic
/// given the seed. Returns `None` when the typed slice is undefined in
/// either run (no typed support).
pub fn permutation_gap_test(
    in_run: &ModelRun,
    out_run: &ModelRun,
    type_name: &str,
    metric: GapMetric,
    params: &SignificanceParams,
) -> Result<Option<PermutationOutcome>> {
    if in_run.test_set != out_run.test_set {
        return Err(Error::Config(format!(
            "permutation test needs runs on the same test set ('{}' vs '{}')",
            in_run.test_set, out_run.test_set
        )));
    }
    if in_run.doc_ids() != out_run.doc_ids() {
        return Err(Error::Config(format!(
            "runs '{}' and '{}' cover different document sets",
            in_run.model_id, out_run.model_id
        )));
    }
    if in_run.per_document_scores.is_empty() {
        return Ok(None);
    }
    if in_run.typed_f1(type_name).is_none() || out_run.typed_f1(type_name).is_none() {
        return Ok(None);
    }
    let Some(observed) = observed_delta(in_run, out_run, type_name, metric) else {
        return Ok(None);
    };

    let n_docs = in_run.per_document_scores.len();
    let in_docs = &in_run.per_document_scores;
    let out_docs = &out_run.per_document_scores;

    let exceed: u64 = (0..params.n_perms)
        .into_par_iter()
        .map(|perm| {
            let mut rng = ChaCha8Rng::seed_from_u64(substream_seed(params.seed, perm));
            let mask: Vec<bool> = (0..n_docs).map(|_| rng.gen::<bool>()).collect();
            // Runs produced by scoring keep every slice defined under
            // label swaps (gold-side denominators are document-wise
            // symmetric); should hand-built records violate that, an
            // undefined assignment counts against significance.
            swap_delta(in_docs, out_docs, type_name, metric, |i| mask[i])
                .map_or(1, |delta| u64::from(delta >= observed))
        })
        .sum();

    let p_value = (1 + exceed) as f64 / (1 + params.n_perms) as f64;
    Ok(Some(PermutationOutcome {
        observed,
        p_value,
        significant: p_value < params.alpha,
    }))
}

/// Gap and significance for one coreference type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeGap {
    pub tgg: Option<f64>,
    pub p_value: Option<f64>,
    pub significant: bool,
}

/// Gaps of one out-of-domain run relative to one reference run, on one
/// test set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    /// Test set the out-of-domain run was evaluated on.
    pub test_set: String,
    /// Test set of the reference run (equal to `test_set` unless gaps are
    /// oriented across datasets for a single model).
    pub in_test_set: String,
    pub in_model: String,
    pub out_model: String,
    pub agg: Option<f64>,
    pub per_type: BTreeMap<String, TypeGap>,
}

/// Settings shared by a batch of gap reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapSettings {
    pub metric: GapMetric,
    pub significance: SignificanceParams,
    pub types: Vec<String>,
}

impl Default for GapSettings {
    fn default() -> Self {
        GapSettings {
            metric: GapMetric::BCubed,
            significance: SignificanceParams::default(),
            types: Vec::new(),
        }
    }
}

/// One gap report per out-of-domain run. Significance testing runs only
/// when both runs carry per-document records on the same test set.
pub fn build_gap_report(
    in_run: &ModelRun,
    out_runs: &[&ModelRun],
    settings: &GapSettings,
) -> Result<Vec<GapReport>> {
    let mut reports = Vec::with_capacity(out_runs.len());
    for out_run in out_runs {
        let agg = aggregate_gap(
            in_run.corpus_f1(settings.metric),
            out_run.corpus_f1(settings.metric),
        );
        let mut per_type = BTreeMap::new();
        for type_name in &settings.types {
            let tgg = type_gap(in_run.typed_f1(type_name), out_run.typed_f1(type_name));
            let testable = in_run.test_set == out_run.test_set
                && !in_run.per_document_scores.is_empty()
                && !out_run.per_document_scores.is_empty();
            let outcome = if testable {
                permutation_gap_test(
                    in_run,
                    out_run,
                    type_name,
                    settings.metric,
                    &settings.significance,
                )?
            } else {
                None
            };
            per_type.insert(
                type_name.clone(),
                TypeGap {
                    tgg,
                    p_value: outcome.map(|o| o.p_value),
                    significant: outcome.map(|o| o.significant).unwrap_or(false),
                },
            );
        }
        reports.push(GapReport {
            test_set: out_run.test_set.clone(),
            in_test_set: in_run.test_set.clone(),
            in_model: in_run.model_id.clone(),
            out_model: out_run.model_id.clone(),
            agg,
            per_type,
        });
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc_scores(
        doc_id: &str,
        all: (f64, f64, f64, f64),
        typed: (f64, f64, f64, f64),
    ) -> DocumentScores {
        let mut counts = BTreeMap::new();
        counts.insert(
            ScoreKey::all(Metric::BCubed),
            PairCounts {
                recall_num: all.0,
                recall_den: all.1,
                precision_num: all.2,
                precision_den: all.3,
            },
        );
        counts.insert(
            ScoreKey::typed(Metric::BCubed, "nested"),
            PairCounts {
                recall_num: typed.0,
                recall_den: typed.1,
                precision_num: typed.2,
                precision_den: typed.3,
            },
        );
        DocumentScores {
            doc_id: doc_id.into(),
            counts,
        }
    }

    fn run(model: &str, docs: Vec<DocumentScores>) -> ModelRun {
        ModelRun::from_document_scores(model, "set", docs)
    }

    #[test]
    fn gap_is_absolute_difference() {
        assert_eq!(aggregate_gap(Some(0.795), Some(0.529)), Some(0.266));
        assert_eq!(aggregate_gap(Some(0.4), Some(0.4)), Some(0.0));
        // Recorded aggregate fixtures: 82.6 vs 69.9 gives 12.7 points.
        let gap = aggregate_gap(Some(0.826), Some(0.699)).unwrap();
        assert!((gap - 0.127).abs() < 1e-12);
        assert_eq!(aggregate_gap(None, Some(0.5)), None);
    }

    #[test]
    fn gap_is_symmetric() {
        for (a, b) in [(0.3, 0.7), (0.0, 1.0), (0.55, 0.41)] {
            assert_eq!(
                aggregate_gap(Some(a), Some(b)),
                aggregate_gap(Some(b), Some(a))
            );
        }
    }

    #[test]
    fn typed_gap_reproduces_recorded_cells() {
        // 55.6 vs 3.6 -> 52.0; 81.0 vs 0.0 -> 81.0.
        let g = type_gap(Some(0.556), Some(0.036)).unwrap();
        assert!((g - 0.52).abs() < 1e-12);
        let g = type_gap(Some(0.81), Some(0.0)).unwrap();
        assert!((g - 0.81).abs() < 1e-12);
        assert_eq!(type_gap(Some(0.5), Some(0.5)), Some(0.0));
    }

    #[test]
    fn identical_runs_give_p_one_and_no_significance() {
        let docs: Vec<DocumentScores> = (0..8)
            .map(|i| doc_scores(&format!("d{i}"), (3.0, 4.0, 3.0, 4.0), (1.0, 2.0, 1.0, 2.0)))
            .collect();
        let a = run("a", docs.clone());
        let b = run("b", docs);
        let outcome = permutation_gap_test(
            &a,
            &b,
            "nested",
            GapMetric::BCubed,
            &SignificanceParams {
                n_perms: 500,
                alpha: 0.1,
                seed: 1,
            },
        )
        .unwrap()
        .unwrap();
        assert_eq!(outcome.observed, 0.0);
        assert_eq!(outcome.p_value, 1.0);
        assert!(!outcome.significant);
    }

    #[test]
    fn typed_failure_across_all_documents_is_significant() {
        // Out-run matches the in-run on aggregate counts but loses every
        // typed mention.
        let in_docs: Vec<DocumentScores> = (0..12)
            .map(|i| {
                doc_scores(
                    &format!("d{i:02}"),
                    (8.0, 10.0, 8.0, 10.0),
                    (2.0, 2.0, 2.0, 2.0),
                )
            })
            .collect();
        let out_docs: Vec<DocumentScores> = (0..12)
            .map(|i| {
                doc_scores(
                    &format!("d{i:02}"),
                    (8.0, 10.0, 8.0, 10.0),
                    (0.0, 2.0, 0.0, 2.0),
                )
            })
            .collect();
        let a = run("in", in_docs);
        let b = run("out", out_docs);
        let outcome = permutation_gap_test(
            &a,
            &b,
            "nested",
            GapMetric::BCubed,
            &SignificanceParams::default(),
        )
        .unwrap()
        .unwrap();
        assert!(outcome.p_value <= 0.01, "p = {}", outcome.p_value);
        assert!(outcome.significant);
    }

    #[test]
    fn identical_seeds_reproduce_p_values() {
        let in_docs: Vec<DocumentScores> = (0..10)
            .map(|i| {
                let x = (i as f64 + 1.0) / 11.0;
                doc_scores(
                    &format!("d{i}"),
                    (x * 4.0, 4.0, x * 4.0, 4.0),
                    (x, 2.0, x, 2.0),
                )
            })
            .collect();
        let out_docs: Vec<DocumentScores> = (0..10)
            .map(|i| {
                let x = 1.0 - (i as f64 + 1.0) / 12.0;
                doc_scores(
                    &format!("d{i}"),
                    (x * 4.0, 4.0, x * 4.0, 4.0),
                    (x, 2.0, x, 2.0),
                )
            })
            .collect();
        let a = run("a", in_docs);
        let b = run("b", out_docs);
        let params = SignificanceParams {
            n_perms: 2000,
            alpha: 0.1,
            seed: 99,
        };
        let p1 = permutation_gap_test(&a, &b, "nested", GapMetric::BCubed, &params)
            .unwrap()
            .unwrap()
            .p_value;
        let p2 = permutation_gap_test(&a, &b, "nested", GapMetric::BCubed, &params)
            .unwrap()
            .unwrap()
            .p_value;
        assert_eq!(p1, p2);
        let p3 = permutation_gap_test(
            &a,
            &b,
            "nested",
            GapMetric::BCubed,
            &SignificanceParams {
                seed: 100,
                ..params
            },
        )
        .unwrap()
        .unwrap()
        .p_value;
        assert_ne!(p1, p3);
    }

    #[test]
    fn disjoint_typed_coverage_degrades_conservatively() {
        // Each run has typed mass in a different document, so some swap
        // assignments leave a side undefined; those count against
        // significance instead of panicking.
        let in_docs = vec![
            doc_scores("d0", (3.0, 4.0, 3.0, 4.0), (2.0, 2.0, 2.0, 2.0)),
            doc_scores("d1", (3.0, 4.0, 3.0, 4.0), (0.0, 0.0, 0.0, 0.0)),
        ];
        let out_docs = vec![
            doc_scores("d0", (3.0, 4.0, 3.0, 4.0), (0.0, 0.0, 0.0, 0.0)),
            doc_scores("d1", (3.0, 4.0, 3.0, 4.0), (0.0, 2.0, 0.0, 2.0)),
        ];
        let a = run("a", in_docs);
        let b = run("b", out_docs);
        let outcome = permutation_gap_test(
            &a,
            &b,
            "nested",
            GapMetric::BCubed,
            &SignificanceParams {
                n_perms: 400,
                alpha: 0.1,
                seed: 21,
            },
        )
        .unwrap()
        .unwrap();
        assert!(outcome.p_value > 0.0 && outcome.p_value <= 1.0);
    }

    #[test]
    fn zero_typed_support_skips_the_test() {
        let in_docs = vec![doc_scores("d0", (3.0, 4.0, 3.0, 4.0), (0.0, 0.0, 0.0, 0.0))];
        let out_docs = vec![doc_scores("d0", (2.0, 4.0, 2.0, 4.0), (0.0, 0.0, 0.0, 0.0))];
        let a = run("a", in_docs);
        let b = run("b", out_docs);
        let outcome = permutation_gap_test(
            &a,
            &b,
            "nested",
            GapMetric::BCubed,
            &SignificanceParams::default(),
        )
        .unwrap();
        assert!(outcome.is_none());
    }

    #[test]
    fn mismatched_document_sets_error() {
        let a = run(
            "a",
            vec![doc_scores("d0", (1.0, 2.0, 1.0, 2.0), (1.0, 1.0, 1.0, 1.0))],
        );
        let b = run(
            "b",
            vec![doc_scores("dX", (1.0, 2.0, 1.0, 2.0), (1.0, 1.0, 1.0, 1.0))],
        );
        assert!(
            permutation_gap_test(&a, &b, "nested", GapMetric::BCubed, &Default::default()).is_err()
        );
    }

    #[test]
    fn swap_delta_with_identity_mask_equals_observed_delta() {
        let in_docs: Vec<DocumentScores> = (0..7)
            .map(|i| {
                doc_scores(
                    &format!("d{i}"),
                    (i as f64 * 0.7, 4.0, 2.0, 4.0),
                    (1.0, 2.0, 0.5, 2.0),
                )
            })
            .collect();
        let out_docs: Vec<DocumentScores> = (0..7)
            .map(|i| {
                doc_scores(
                    &format!("d{i}"),
                    (i as f64 * 0.3, 4.0, 3.0, 4.0),
                    (0.25, 2.0, 1.5, 2.0),
                )
            })
            .collect();
        let a = run("a", in_docs.clone());
        let b = run("b", out_docs.clone());
        let observed = observed_delta(&a, &b, "nested", GapMetric::BCubed).unwrap();
        let replayed = swap_delta(
            &a.per_document_scores,
            &b.per_document_scores,
            "nested",
            GapMetric::BCubed,
            |_| false,
        )
        .unwrap();
        assert_eq!(observed.to_bits(), replayed.to_bits());
    }

    #[test]
    fn corpus_scores_are_invariant_under_document_order() {
        let docs: Vec<DocumentScores> = (0..6)
            .map(|i| {
                doc_scores(
                    &format!("d{i}"),
                    (i as f64, 4.0, 2.0, 4.0),
                    (1.0, 2.0, 1.0, 2.0),
                )
            })
            .collect();
        let mut reversed = docs.clone();
        reversed.reverse();
        let a = ModelRun::from_document_scores("m", "s", docs);
        let b = ModelRun::from_document_scores("m", "s", reversed);
        assert_eq!(a.corpus_scores, b.corpus_scores);
        assert_eq!(a.per_document_scores, b.per_document_scores);
    }

    #[test]
    fn aggregation_consistency_holds_by_construction() {
        let docs: Vec<DocumentScores> = (0..5)
            .map(|i| {
                doc_scores(
                    &format!("d{i}"),
                    (i as f64, 4.0, 2.0, 4.0),
                    (1.0, 2.0, 1.0, 2.0),
                )
            })
            .collect();
        let r = run("m", docs);
        assert_eq!(r.corpus_scores, r.recompute_corpus_scores());
    }

    #[test]
    fn gap_report_for_run_against_itself_is_all_zero() {
        let docs: Vec<DocumentScores> = (0..4)
            .map(|i| doc_scores(&format!("d{i}"), (3.0, 4.0, 3.0, 4.0), (1.0, 2.0, 1.0, 2.0)))
            .collect();
        let a = run("a", docs);
        let settings = GapSettings {
            types: vec!["nested".into()],
            ..Default::default()
        };
        let reports = build_gap_report(&a, &[&a], &settings).unwrap();
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].agg, Some(0.0));
        let tg = &reports[0].per_type["nested"];
        assert_eq!(tg.tgg, Some(0.0));
        assert_eq!(tg.p_value, Some(1.0));
        assert!(!tg.significant);
    }

    #[test]
    fn recorded_runs_report_gaps_without_p_values() {
        let mut in_f1 = BTreeMap::new();
        in_f1.insert(ScoreKey::all(Metric::BCubed), 0.795);
        in_f1.insert(ScoreKey::typed(Metric::BCubed, "nested"), 0.556);
        let mut out_f1 = BTreeMap::new();
        out_f1.insert(ScoreKey::all(Metric::BCubed), 0.529);
        out_f1.insert(ScoreKey::typed(Metric::BCubed, "nested"), 0.036);
        let a = ModelRun::from_recorded_f1("in", "set", in_f1);
        let b = ModelRun::from_recorded_f1("out", "set", out_f1);
        let settings = GapSettings {
            types: vec!["nested".into()],
            ..Default::default()
        };
        let reports = build_gap_report(&a, &[&b], &settings).unwrap();
        let report = &reports[0];
        assert!((report.agg.unwrap() - 0.266).abs() < 1e-12);
        let tg = &report.per_type["nested"];
        assert!((tg.tgg.unwrap() - 0.52).abs() < 1e-12);
        assert_eq!(tg.p_value, None);
        assert!(!tg.significant);
    }
}
