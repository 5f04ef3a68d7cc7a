//! Curated micro-corpora and recorded numeric values embedded in the
//! crate for regression tests. Each fixture is a directory of plain-text
//! files: a gold bracket file, an optional dependency sidecar, optional
//! per-system prediction files, and an `expect.toml` with the expected
//! types, counts, or gap values.

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::ingest::{align, parse_coref_file, AlignOptions, IngestOptions, Warning};
use crate::types::{Corpus, Span};

const EXPECT_SCHEMA: u32 = 1;

/// Raw fixture sources as embedded in the crate.
#[derive(Debug, Clone, Copy)]
pub struct Fixture {
    pub id: &'static str,
    pub gold: Option<&'static str>,
    pub parses: Option<&'static str>,
    pub predictions: &'static [(&'static str, &'static str)],
    pub expect_toml: &'static str,
}

macro_rules! corpus_fixture {
    ($id:literal) => {
        Fixture {
            id: $id,
            gold: Some(include_str!(concat!("../../fixtures/", $id, "/gold.conll"))),
            parses: Some(include_str!(concat!(
                "../../fixtures/",
                $id,
                "/parses.conllu"
            ))),
            predictions: &[],
            expect_toml: include_str!(concat!("../../fixtures/", $id, "/expect.toml")),
        }
    };
}

static FIXTURES: &[Fixture] = &[
    corpus_fixture!("preco-trees"),
    corpus_fixture!("taiwan-compound"),
    corpus_fixture!("he-himself-nested"),
    corpus_fixture!("copular-little-girl"),
    corpus_fixture!("abe-the-chef"),
    corpus_fixture!("verb-phrase-grow"),
    corpus_fixture!("bridges-generic"),
    corpus_fixture!("zhou-copular"),
    Fixture {
        id: "micro-corpus",
        gold: Some(include_str!("../../fixtures/micro-corpus/gold.conll")),
        parses: Some(include_str!("../../fixtures/micro-corpus/parses.conllu")),
        predictions: &[(
            "merge-split",
            include_str!("../../fixtures/micro-corpus/pred.merge-split.conll"),
        )],
        expect_toml: include_str!("../../fixtures/micro-corpus/expect.toml"),
    },
    Fixture {
        id: "dup-span-warning",
        gold: Some(include_str!("../../fixtures/dup-span-warning/gold.conll")),
        parses: None,
        predictions: &[],
        expect_toml: include_str!("../../fixtures/dup-span-warning/expect.toml"),
    },
    Fixture {
        id: "recorded-gaps",
        gold: None,
        parses: None,
        predictions: &[],
        expect_toml: include_str!("../../fixtures/recorded-gaps/expect.toml"),
    },
];

/// Expected mention types for one span; `types` is the exhaustive set.
#[derive(Debug, Clone, Deserialize)]
pub struct MentionTypesExpect {
    pub mention: (usize, usize, usize),
    pub types: Vec<String>,
    #[serde(default)]
    pub origin: String,
}

impl MentionTypesExpect {
    pub fn span(&self) -> Span {
        Span::new(self.mention.0, self.mention.1, self.mention.2)
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct TypedCountExpect {
    #[serde(rename = "type")]
    pub type_name: String,
    pub count: usize,
    #[serde(default)]
    pub origin: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct StructureExpect {
    pub clusters: usize,
    pub mentions: usize,
}

/// A recorded corpus-level run: F1 percentages keyed by `all` or a type
/// name.
#[derive(Debug, Clone, Deserialize)]
pub struct RecordedRun {
    pub model: String,
    pub test_set: String,
    pub f1: BTreeMap<String, f64>,
}

/// Expected gap cells (percent) for one (test set, out model) pair.
#[derive(Debug, Clone, Deserialize)]
pub struct ExpectedGap {
    pub test_set: String,
    pub in_model: String,
    pub out_model: String,
    pub gaps: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Expectations {
    pub schema: u32,
    pub description: String,
    #[serde(default)]
    pub allow_warnings: bool,
    #[serde(default)]
    pub mention_types: Vec<MentionTypesExpect>,
    #[serde(default)]
    pub typed_counts: Vec<TypedCountExpect>,
    #[serde(default)]
    pub structure: Option<StructureExpect>,
    #[serde(default, rename = "run")]
    pub runs: Vec<RecordedRun>,
    #[serde(default, rename = "expected_gap")]
    pub expected_gaps: Vec<ExpectedGap>,
}

/// A fixture after parsing and alignment validation.
#[derive(Debug, Clone)]
pub struct LoadedFixture {
    pub id: &'static str,
    pub corpus: Option<Corpus>,
    pub predictions: BTreeMap<&'static str, Corpus>,
    pub expectations: Expectations,
    pub warnings: Vec<Warning>,
}

pub fn fixture_ids() -> Vec<&'static str> {
    FIXTURES.iter().map(|f| f.id).collect()
}

pub fn fixture_source(id: &str) -> Result<&'static Fixture> {
    FIXTURES
        .iter()
        .find(|f| f.id == id)
        .ok_or_else(|| Error::Config(format!("unknown fixture '{id}'")))
}

fn parse_expectations(id: &str, text: &str) -> Result<Expectations> {
    let expectations: Expectations = toml::from_str(text)
        .map_err(|e| Error::Config(format!("fixture '{id}': bad expectations: {e}")))?;
    if expectations.schema != EXPECT_SCHEMA {
        return Err(Error::Config(format!(
            "fixture '{id}': stale expectation schema {} (expected {EXPECT_SCHEMA})",
            expectations.schema
        )));
    }
    Ok(expectations)
}

/// Parses, aligns, and validates one fixture. Fixtures must ingest
/// without warnings unless they deliberately test a warning path.
pub fn load_fixture(id: &str) -> Result<LoadedFixture> {
    let source = fixture_source(id)?;
    let expectations = parse_expectations(id, source.expect_toml)?;

    let mut warnings = Vec::new();
    let corpus = match source.gold {
        Some(gold) => {
            let parsed = parse_coref_file(gold, &IngestOptions::named(id))?;
            warnings.extend(parsed.warnings);
            let mut corpus = parsed.corpus;
            if let Some(parses) = source.parses {
                let deps = crate::ingest::parse_dependency_file(parses)?;
                warnings.extend(align(&mut corpus, &deps, &AlignOptions::default())?);
            }
            Some(corpus)
        }
        None => None,
    };

    let mut predictions = BTreeMap::new();
    for (system, text) in source.predictions {
        let parsed = parse_coref_file(text, &IngestOptions::named(format!("{id}/{system}")))?;
        warnings.extend(parsed.warnings);
        predictions.insert(*system, parsed.corpus);
    }

    if !expectations.allow_warnings && !warnings.is_empty() {
        return Err(Error::Internal(format!(
            "fixture '{id}' produced unexpected warnings: {}",
            warnings
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("; ")
        )));
    }

    Ok(LoadedFixture {
        id: source.id,
        corpus,
        predictions,
        expectations,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::typing::{type_all, PartitionOrigin, TypingConfig};

    #[test]
    fn every_fixture_loads_cleanly() {
        for id in fixture_ids() {
            let fixture = load_fixture(id).unwrap();
            if let Some(corpus) = &fixture.corpus {
                corpus.validate().unwrap();
            }
            assert!(fixture.expectations.allow_warnings || fixture.warnings.is_empty());
        }
    }

    #[test]
    fn unknown_fixture_id_is_rejected() {
        assert!(load_fixture("no-such-fixture").is_err());
    }

    #[test]
    fn stale_expectation_schema_is_rejected() {
        let err = parse_expectations("x", "schema = 99\ndescription = \"d\"\n").unwrap_err();
        assert!(err.to_string().contains("stale expectation schema"));
    }

    #[test]
    fn corpus_fixtures_are_parse_aligned() {
        for id in fixture_ids() {
            let fixture = load_fixture(id).unwrap();
            let (Some(corpus), Some(_)) = (&fixture.corpus, fixture_source(id).unwrap().parses)
            else {
                continue;
            };
            for doc in &corpus.documents {
                assert!(doc.is_parse_aligned(), "{id}: {} not aligned", doc.doc_id);
            }
        }
    }

    #[test]
    fn expected_mention_spans_exist_in_the_gold_partition() {
        for id in fixture_ids() {
            let fixture = load_fixture(id).unwrap();
            let Some(corpus) = &fixture.corpus else {
                continue;
            };
            for expect in &fixture.expectations.mention_types {
                let span = expect.span();
                assert!(
                    corpus.documents.iter().any(|d| d.gold.contains(&span)),
                    "{id}: expected mention {span} missing from gold"
                );
            }
        }
    }

    #[test]
    fn warning_fixture_exercises_the_collapse_path() {
        let fixture = load_fixture("dup-span-warning").unwrap();
        assert_eq!(fixture.warnings.len(), 1);
        let corpus = fixture.corpus.unwrap();
        assert_eq!(corpus.documents[0].gold.mention_count(), 2);
    }

    #[test]
    fn typed_expectations_reference_types_that_type_all_produces() {
        // Smoke check one fixture end to end; the full matrix is covered
        // by the acceptance suite.
        let fixture = load_fixture("preco-trees").unwrap();
        let corpus = fixture.corpus.unwrap();
        let doc = &corpus.documents[0];
        let typed = type_all(
            doc,
            &doc.gold,
            PartitionOrigin::Gold,
            &TypingConfig::default(),
        )
        .unwrap();
        assert_eq!(typed.len(), 2);
    }
}
