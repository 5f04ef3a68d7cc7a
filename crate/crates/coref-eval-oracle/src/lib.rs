//! Brute-force reference implementations used only by tests to validate
//! the optimized metric and significance code in `coref-eval`.
//!
//! These deliberately share no code with the production scoring paths:
//! cluster lookups are linear scans, set intersections are nested loops,
//! the cluster matching is exhaustive, and the permutation distribution
//! is enumerated rather than sampled.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use coref_eval::gaps::DocumentScores;
use coref_eval::metrics::ScoreTriple;
use coref_eval::types::{EntityPartition, Span};

/// Cluster of `span` by linear scan; no index structures.
fn scan_cluster<'a>(partition: &'a EntityPartition, span: &Span) -> Option<&'a [Span]> {
    partition
        .clusters()
        .iter()
        .find(|cluster| cluster.contains(span))
        .map(Vec::as_slice)
}

/// Set intersection size by nested loops.
fn overlap(a: &[Span], b: &[Span]) -> usize {
    a.iter().filter(|span| b.contains(span)).count()
}

fn harmonic(r: Option<f64>, p: Option<f64>) -> (Option<f64>, bool) {
    match (r, p) {
        (Some(r), Some(p)) => (
            Some(if r + p > 0.0 {
                2.0 * r * p / (r + p)
            } else {
                0.0
            }),
            false,
        ),
        (None, None) => (None, false),
        _ => (Some(0.0), true),
    }
}

fn triple(
    recall_num: f64,
    recall_den: usize,
    precision_num: f64,
    precision_den: usize,
) -> ScoreTriple {
    let recall = (recall_den > 0).then(|| recall_num / recall_den as f64);
    let precision = (precision_den > 0).then(|| precision_num / precision_den as f64);
    let (f1, f1_one_sided) = harmonic(recall, precision);
    ScoreTriple {
        recall,
        precision,
        f1,
        f1_one_sided,
        support_gold: recall_den,
        support_pred: precision_den,
    }
}

/// Literal per-mention summation of the mention-averaged metric.
pub fn naive_b_cubed(gold: &EntityPartition, pred: &EntityPartition) -> ScoreTriple {
    let mut recall_num = 0.0;
    let mut recall_den = 0usize;
    for cluster in gold.clusters() {
        for span in cluster {
            recall_den += 1;
            let own = scan_cluster(gold, span).unwrap();
            if let Some(other) = scan_cluster(pred, span) {
                recall_num += overlap(own, other) as f64 / own.len() as f64;
            }
        }
    }
    let mut precision_num = 0.0;
    let mut precision_den = 0usize;
    for cluster in pred.clusters() {
        for span in cluster {
            precision_den += 1;
            let own = scan_cluster(pred, span).unwrap();
            if let Some(other) = scan_cluster(gold, span) {
                precision_num += overlap(own, other) as f64 / own.len() as f64;
            }
        }
    }
    triple(recall_num, recall_den, precision_num, precision_den)
}

/// Link-based score by scanning: a cluster of size n cut into p pieces by
/// the other partition keeps n - p of its n - 1 links. Mentions missing
/// from the other side are their own pieces.
pub fn naive_muc(gold: &EntityPartition, pred: &EntityPartition) -> ScoreTriple {
    fn side(base: &EntityPartition, other: &EntityPartition) -> (f64, f64) {
        let mut num = 0.0;
        let mut den = 0.0;
        for cluster in base.clusters() {
            let mut pieces: Vec<usize> = Vec::new();
            let mut missing = 0usize;
            for span in cluster {
                match other.clusters().iter().position(|c| c.contains(span)) {
                    Some(index) => {
                        if !pieces.contains(&index) {
                            pieces.push(index);
                        }
                    }
                    None => missing += 1,
                }
            }
            num += (cluster.len() - pieces.len() - missing) as f64;
            den += (cluster.len() - 1) as f64;
        }
        (num, den)
    }
    let (rn, rd) = side(gold, pred);
    let (pn, pd) = side(pred, gold);
    let recall = (rd > 0.0).then(|| rn / rd);
    let precision = (pd > 0.0).then(|| pn / pd);
    let (f1, f1_one_sided) = harmonic(recall, precision);
    ScoreTriple {
        recall,
        precision,
        f1,
        f1_one_sided,
        support_gold: rd as usize,
        support_pred: pd as usize,
    }
}

fn phi4(a: &[Span], b: &[Span]) -> f64 {
    2.0 * overlap(a, b) as f64 / (a.len() + b.len()) as f64
}

/// Maximum total similarity over all one-to-one cluster alignments by
/// exhaustive permutation. Limited to 8 clusters per side.
pub fn naive_ceaf_matching(gold: &EntityPartition, pred: &EntityPartition) -> Result<f64, String> {
    let k = gold.cluster_count();
    let l = pred.cluster_count();
    if k > 8 || l > 8 {
        return Err(format!(
            "cluster counts {k}x{l} exceed the exhaustive limit of 8"
        ));
    }
    if k == 0 || l == 0 {
        return Ok(0.0);
    }
    let total = |assignment: &[(usize, usize)]| -> f64 {
        assignment
            .iter()
            .map(|&(i, j)| phi4(gold.cluster_spans(i), pred.cluster_spans(j)))
            .sum()
    };
    let mut best = 0.0f64;
    if k <= l {
        for perm in (0..l).permutations(k) {
            let assignment: Vec<(usize, usize)> = perm.into_iter().enumerate().collect();
            best = best.max(total(&assignment));
        }
    } else {
        for perm in (0..k).permutations(l) {
            let assignment: Vec<(usize, usize)> =
                perm.into_iter().enumerate().map(|(j, i)| (i, j)).collect();
            best = best.max(total(&assignment));
        }
    }
    Ok(best)
}

/// Entity-based score on top of the exhaustive matching.
pub fn naive_ceaf_e(gold: &EntityPartition, pred: &EntityPartition) -> Result<ScoreTriple, String> {
    let total = naive_ceaf_matching(gold, pred)?;
    Ok(triple(
        total,
        gold.cluster_count(),
        total,
        pred.cluster_count(),
    ))
}

/// Exact one-sided permutation p-value over all 2^n per-document
/// label-swap assignments (n <= 12). The statistic receives the swapped
/// per-document records of both runs.
pub fn exact_permutation_p(
    in_docs: &[DocumentScores],
    out_docs: &[DocumentScores],
    statistic: &dyn Fn(&[DocumentScores], &[DocumentScores]) -> f64,
) -> Result<f64, String> {
    if in_docs.len() != out_docs.len() {
        return Err("runs cover different document counts".to_string());
    }
    let n = in_docs.len();
    if n > 12 {
        return Err(format!("{n} documents exceed the 2^12 enumeration limit"));
    }
    let observed = statistic(in_docs, out_docs);
    let mut exceed = 0usize;
    let assignments = 1usize << n;
    for mask in 0..assignments {
        let mut left = Vec::with_capacity(n);
        let mut right = Vec::with_capacity(n);
        for i in 0..n {
            if mask & (1 << i) != 0 {
                left.push(out_docs[i].clone());
                right.push(in_docs[i].clone());
            } else {
                left.push(in_docs[i].clone());
                right.push(out_docs[i].clone());
            }
        }
        if statistic(&left, &right) >= observed {
            exceed += 1;
        }
    }
    Ok(exceed as f64 / assignments as f64)
}

/// Shape of a random gold/pred partition pair for metric stress tests.
#[derive(Debug, Clone, Copy)]
pub struct RandomInstanceSpec {
    pub n_mentions: usize,
    pub max_clusters: usize,
    pub seed: u64,
    pub overlap_allowed: bool,
}

#[derive(Debug, Clone)]
pub struct RandomInstance {
    pub gold: EntityPartition,
    pub pred: EntityPartition,
    pub spans: Vec<Span>,
}

/// Random gold and predicted partitions over a shared span universe.
/// Generation is biased toward edge cases: single-cluster pile-ups,
/// all-pairs partitions, and (when allowed) heavily nested spans. Both
/// partitions are singleton-filtered, so they satisfy the partition
/// invariants; either may come out empty.
pub fn generate_instance(spec: &RandomInstanceSpec) -> RandomInstance {
    assert!(spec.n_mentions <= 12, "instances are capped at 12 mentions");
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut spans: Vec<Span> = Vec::new();
    while spans.len() < spec.n_mentions {
        let span = if spec.overlap_allowed {
            let start = rng.gen_range(0..spec.n_mentions * 2);
            let width = rng.gen_range(1..=3);
            Span::new(0, start, start + width - 1)
        } else {
            let i = spans.len();
            Span::new(0, i * 2, i * 2)
        };
        if !spans.contains(&span) {
            spans.push(span);
        }
    }
    spans.sort();

    let gold = random_partition(&mut rng, &spans, spec.max_clusters);
    let pred = random_partition(&mut rng, &spans, spec.max_clusters);
    RandomInstance { gold, pred, spans }
}

fn random_partition(rng: &mut ChaCha8Rng, spans: &[Span], max_clusters: usize) -> EntityPartition {
    let max_clusters = max_clusters.max(1);
    let mode = rng.gen_range(0..10);
    let mut clusters: Vec<Vec<Span>> = Vec::new();
    match mode {
        // One cluster holding everything.
        0 | 1 => {
            let kept: Vec<Span> = spans
                .iter()
                .copied()
                .filter(|_| rng.gen_range(0..10) < 9)
                .collect();
            clusters.push(kept);
        }
        // All-pairs partition.
        2 | 3 => {
            let mut pool: Vec<Span> = spans.to_vec();
            while pool.len() >= 2 {
                let b = pool.pop().unwrap();
                let a = pool.pop().unwrap();
                clusters.push(vec![a, b]);
            }
        }
        // Random assignment with dropout.
        _ => {
            clusters.resize(max_clusters, Vec::new());
            for &span in spans {
                if rng.gen_range(0..10) < 2 {
                    continue;
                }
                let c = rng.gen_range(0..max_clusters);
                clusters[c].push(span);
            }
        }
    }
    let kept: Vec<Vec<Span>> = clusters.into_iter().filter(|c| c.len() >= 2).collect();
    EntityPartition::from_clusters(kept).expect("random clusters are disjoint by construction")
}
