//! Scope filters: discontinuous mentions are dropped, then clusters that
//! fall below two mentions are removed entirely (singleton exclusion).

use serde::Serialize;

use crate::types::{Corpus, EntityPartition, Span};

/// A mention candidate as some formats deliver it: one or more contiguous
/// parts. More than one part means the mention is discontinuous.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawMention {
    pub parts: Vec<Span>,
}

impl RawMention {
    pub fn contiguous(span: Span) -> Self {
        RawMention { parts: vec![span] }
    }

    pub fn is_discontinuous(&self) -> bool {
        self.parts.len() > 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct FilterStats {
    /// Mentions dropped for spanning more than one contiguous interval.
    pub discontinuous_mentions_removed: usize,
    /// Contiguous mentions dropped because their cluster fell below two.
    pub singleton_mentions_removed: usize,
    /// Clusters removed entirely.
    pub clusters_removed: usize,
}

impl FilterStats {
    pub fn merge(&mut self, other: &FilterStats) {
        self.discontinuous_mentions_removed += other.discontinuous_mentions_removed;
        self.singleton_mentions_removed += other.singleton_mentions_removed;
        self.clusters_removed += other.clusters_removed;
    }

    pub fn anything_removed(&self) -> bool {
        *self != FilterStats::default()
    }
}

/// Applies both scope rules to raw clusters and returns the surviving
/// contiguous clusters.
pub fn filter_clusters(clusters: Vec<Vec<RawMention>>) -> (Vec<Vec<Span>>, FilterStats) {
    let mut stats = FilterStats::default();
    let mut kept: Vec<Vec<Span>> = Vec::with_capacity(clusters.len());
    for cluster in clusters {
        let total = cluster.len();
        let spans: Vec<Span> = cluster
            .into_iter()
            .filter_map(|m| {
                if m.is_discontinuous() {
                    stats.discontinuous_mentions_removed += 1;
                    None
                } else {
                    Some(m.parts[0])
                }
            })
            .collect();
        if spans.len() < 2 {
            if total > 0 {
                stats.clusters_removed += 1;
            }
            stats.singleton_mentions_removed += spans.len();
            continue;
        }
        kept.push(spans);
    }
    (kept, stats)
}

/// Scope-filters every document's gold partition. Bracket-format input
/// cannot encode discontinuous mentions, so on such corpora only the
/// singleton rule can fire.
pub fn filter_scope(corpus: Corpus) -> (Corpus, FilterStats) {
    let mut stats = FilterStats::default();
    let documents = corpus
        .documents
        .into_iter()
        .map(|mut doc| {
            let clusters: Vec<Vec<RawMention>> = doc
                .gold
                .clusters()
                .iter()
                .map(|c| c.iter().copied().map(RawMention::contiguous).collect())
                .collect();
            let (kept, doc_stats) = filter_clusters(clusters);
            stats.merge(&doc_stats);
            doc.gold = EntityPartition::from_clusters(kept)
                .expect("filtering preserves partition disjointness");
            doc
        })
        .collect();
    (
        Corpus {
            name: corpus.name,
            split: corpus.split,
            documents,
        },
        stats,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(start: usize, end: usize) -> Span {
        Span::new(0, start, end)
    }

    #[test]
    fn two_mention_cluster_is_unchanged() {
        let (kept, stats) = filter_clusters(vec![vec![
            RawMention::contiguous(sp(0, 1)),
            RawMention::contiguous(sp(3, 3)),
        ]]);
        assert_eq!(kept, vec![vec![sp(0, 1), sp(3, 3)]]);
        assert!(!stats.anything_removed());
    }

    #[test]
    fn singleton_cluster_is_removed() {
        let (kept, stats) = filter_clusters(vec![vec![RawMention::contiguous(sp(0, 0))]]);
        assert!(kept.is_empty());
        assert_eq!(stats.clusters_removed, 1);
        assert_eq!(stats.singleton_mentions_removed, 1);
    }

    #[test]
    fn discontinuity_can_cascade_into_cluster_removal() {
        // A two-mention cluster where one mention is discontinuous loses
        // that mention, falls below two, and is removed entirely.
        let discontinuous = RawMention {
            parts: vec![sp(0, 1), sp(4, 5)],
        };
        let (kept, stats) =
            filter_clusters(vec![vec![RawMention::contiguous(sp(2, 2)), discontinuous]]);
        assert!(kept.is_empty());
        assert_eq!(stats.discontinuous_mentions_removed, 1);
        assert_eq!(stats.singleton_mentions_removed, 1);
        assert_eq!(stats.clusters_removed, 1);
    }

    #[test]
    fn filter_scope_enforces_min_cluster_size() {
        let text = "#begin document (d)\n\
                    a (0)|(1\nb 1)\nc (0)\nd (2)\n\n#end document\n";
        let parsed = crate::ingest::parse_coref_file(text, &Default::default()).unwrap();
        let (filtered, stats) = filter_scope(parsed.corpus);
        let doc = &filtered.documents[0];
        assert_eq!(doc.gold.cluster_count(), 1);
        assert!(doc.gold.min_cluster_size().unwrap() >= 2);
        assert_eq!(stats.clusters_removed, 2);
        assert_eq!(stats.singleton_mentions_removed, 2);
    }
}
