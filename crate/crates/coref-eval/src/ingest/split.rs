//! Deterministic train/dev/test split generation.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{Corpus, Split};

/// How a corpus file maps onto splits. Random rules are deterministic
/// given the seed, and document order is preserved within each output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SplitRule {
    /// The file already is exactly one split.
    Identity,
    /// The last `n` documents become the dev split, the rest stay train.
    TakeLastDev { n: usize },
    /// `n` randomly chosen documents become the dev split.
    RandomDev { n: usize },
    /// Random percentage split; the three parts must sum to 100.
    Percent { train: u32, dev: u32, test: u32 },
}

impl std::fmt::Display for SplitRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SplitRule::Identity => write!(f, "identity"),
            SplitRule::TakeLastDev { n } => write!(f, "take-last-dev:{n}"),
            SplitRule::RandomDev { n } => write!(f, "random-dev:{n}"),
            SplitRule::Percent { train, dev, test } => write!(f, "percent:{train}/{dev}/{test}"),
        }
    }
}

impl std::str::FromStr for SplitRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "identity" {
            return Ok(SplitRule::Identity);
        }
        if let Some(n) = s.strip_prefix("take-last-dev:") {
            let n = n
                .parse()
                .map_err(|_| Error::Config(format!("bad split rule '{s}'")))?;
            return Ok(SplitRule::TakeLastDev { n });
        }
        if let Some(n) = s.strip_prefix("random-dev:") {
            let n = n
                .parse()
                .map_err(|_| Error::Config(format!("bad split rule '{s}'")))?;
            return Ok(SplitRule::RandomDev { n });
        }
        if let Some(spec) = s.strip_prefix("percent:") {
            let parts: Vec<u32> = spec
                .split('/')
                .map(|p| {
                    p.parse()
                        .map_err(|_| Error::Config(format!("bad split rule '{s}'")))
                })
                .collect::<Result<_>>()?;
            if parts.len() != 3 {
                return Err(Error::Config(format!("bad split rule '{s}'")));
            }
            if parts.iter().sum::<u32>() != 100 {
                return Err(Error::Config(format!(
                    "percent split '{s}' does not sum to 100"
                )));
            }
            return Ok(SplitRule::Percent {
                train: parts[0],
                dev: parts[1],
                test: parts[2],
            });
        }
        Err(Error::Config(format!(
            "unknown split rule '{s}' (expected identity, take-last-dev:N, random-dev:N, or percent:A/B/C)"
        )))
    }
}

impl From<SplitRule> for String {
    fn from(r: SplitRule) -> String {
        r.to_string()
    }
}

impl TryFrom<String> for SplitRule {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[derive(Debug, Clone)]
pub struct SplitCorpora {
    pub train: Corpus,
    pub dev: Corpus,
    pub test: Corpus,
}

fn sub_corpus(corpus: &Corpus, split: Split, indices: &[usize]) -> Corpus {
    Corpus {
        name: corpus.name.clone(),
        split,
        documents: indices
            .iter()
            .map(|&i| corpus.documents[i].clone())
            .collect(),
    }
}

pub fn split_corpus(corpus: &Corpus, rule: &SplitRule, seed: u64) -> Result<SplitCorpora> {
    let n = corpus.documents.len();
    let all: Vec<usize> = (0..n).collect();
    let (train_idx, dev_idx, test_idx): (Vec<usize>, Vec<usize>, Vec<usize>) = match rule {
        SplitRule::Identity => match corpus.split {
            Split::Train => (all, vec![], vec![]),
            Split::Dev => (vec![], all, vec![]),
            Split::Test => (vec![], vec![], all),
        },
        SplitRule::TakeLastDev { n: take } => {
            if *take > n {
                return Err(Error::Config(format!(
                    "cannot take last {take} documents as dev from a corpus of {n}"
                )));
            }
            (all[..n - take].to_vec(), all[n - take..].to_vec(), vec![])
        }
        SplitRule::RandomDev { n: take } => {
            if *take > n {
                return Err(Error::Config(format!(
                    "cannot sample {take} dev documents from a corpus of {n}"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut dev: Vec<usize> = rand::seq::index::sample(&mut rng, n, *take).into_vec();
            dev.sort_unstable();
            let train: Vec<usize> = all.iter().copied().filter(|i| !dev.contains(i)).collect();
            (train, dev, vec![])
        }
        SplitRule::Percent { dev, test, .. } => {
            let n_dev = n * *dev as usize / 100;
            let n_test = n * *test as usize / 100;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut shuffled = all.clone();
            shuffled.shuffle(&mut rng);
            let mut dev_idx: Vec<usize> = shuffled[..n_dev].to_vec();
            let mut test_idx: Vec<usize> = shuffled[n_dev..n_dev + n_test].to_vec();
            let mut train_idx: Vec<usize> = shuffled[n_dev + n_test..].to_vec();
            dev_idx.sort_unstable();
            test_idx.sort_unstable();
            train_idx.sort_unstable();
            (train_idx, dev_idx, test_idx)
        }
    };
    Ok(SplitCorpora {
        train: sub_corpus(corpus, Split::Train, &train_idx),
        dev: sub_corpus(corpus, Split::Dev, &dev_idx),
        test: sub_corpus(corpus, Split::Test, &test_idx),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Document;

    fn corpus_of(n: usize) -> Corpus {
        Corpus {
            name: "c".into(),
            split: Split::Train,
            documents: (0..n)
                .map(|i| Document {
                    doc_id: format!("doc-{i}"),
                    sentences: vec![],
                    gold: Default::default(),
                })
                .collect(),
        }
    }

    #[test]
    fn take_last_five_hundred_as_dev() {
        let c = corpus_of(36_620);
        let s = split_corpus(&c, &SplitRule::TakeLastDev { n: 500 }, 0).unwrap();
        assert_eq!(s.train.documents.len(), 36_120);
        assert_eq!(s.dev.documents.len(), 500);
        assert!(s.test.documents.is_empty());
        assert_eq!(s.dev.documents[0].doc_id, "doc-36120");
    }

    #[test]
    fn percent_split_80_10_10_on_ten_documents() {
        let c = corpus_of(10);
        let s = split_corpus(
            &c,
            &SplitRule::Percent {
                train: 80,
                dev: 10,
                test: 10,
            },
            7,
        )
        .unwrap();
        assert_eq!(s.train.documents.len(), 8);
        assert_eq!(s.dev.documents.len(), 1);
        assert_eq!(s.test.documents.len(), 1);
    }

    #[test]
    fn same_seed_gives_identical_splits() {
        let c = corpus_of(100);
        let rule = SplitRule::RandomDev { n: 45 };
        let a = split_corpus(&c, &rule, 11).unwrap();
        let b = split_corpus(&c, &rule, 11).unwrap();
        let ids = |c: &Corpus| {
            c.documents
                .iter()
                .map(|d| d.doc_id.clone())
                .collect::<Vec<_>>()
        };
        assert_eq!(ids(&a.dev), ids(&b.dev));
        assert_eq!(ids(&a.train), ids(&b.train));

        let other = split_corpus(&c, &rule, 12).unwrap();
        assert_ne!(ids(&a.dev), ids(&other.dev));
    }

    #[test]
    fn outputs_are_disjoint_and_cover_the_input() {
        let c = corpus_of(23);
        for rule in [
            SplitRule::Identity,
            SplitRule::TakeLastDev { n: 5 },
            SplitRule::RandomDev { n: 7 },
            SplitRule::Percent {
                train: 80,
                dev: 10,
                test: 10,
            },
        ] {
            let s = split_corpus(&c, &rule, 3).unwrap();
            let mut ids: Vec<&str> = s
                .train
                .documents
                .iter()
                .chain(&s.dev.documents)
                .chain(&s.test.documents)
                .map(|d| d.doc_id.as_str())
                .collect();
            ids.sort_unstable();
            let mut expected: Vec<String> = (0..23).map(|i| format!("doc-{i}")).collect();
            expected.sort();
            assert_eq!(ids.len(), 23, "overlap or loss under {rule}");
            assert_eq!(
                ids,
                expected.iter().map(String::as_str).collect::<Vec<_>>(),
                "coverage broken under {rule}"
            );
        }
    }

    #[test]
    fn oversized_dev_request_fails() {
        let c = corpus_of(3);
        assert!(split_corpus(&c, &SplitRule::TakeLastDev { n: 4 }, 0).is_err());
        assert!(split_corpus(&c, &SplitRule::RandomDev { n: 4 }, 0).is_err());
    }

    #[test]
    fn rule_strings_round_trip() {
        for s in [
            "identity",
            "take-last-dev:500",
            "random-dev:45",
            "percent:80/10/10",
        ] {
            let rule: SplitRule = s.parse().unwrap();
            assert_eq!(rule.to_string(), s);
        }
        assert!("percent:80/10/5".parse::<SplitRule>().is_err());
        assert!("nonsense".parse::<SplitRule>().is_err());
    }
}
