//! Multi-dataset, multi-system evaluation driven by an `EvalConfig`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaps::{build_gap_report, DocumentScores, GapReport, GapSettings, ModelRun};
use crate::ingest::{
    align, filter_scope, parse_coref_path, parse_dependency_path, AlignOptions, IngestOptions,
};
use crate::metrics::{
    b_cubed_counts, b_cubed_typed_counts, ceaf_e_counts, muc_counts, Metric, PairCounts, ScoreKey,
    ScoreTriple, TypePredicate,
};
use crate::report::config::{EvalConfig, GapOrientation};
use crate::types::{Corpus, Document, EntityPartition};
use crate::typing::predicates_for_names;

/// Typed scores below this gold support are flagged in reports.
pub const LOW_SUPPORT_THRESHOLD: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypedCell {
    pub score: ScoreTriple,
    pub low_support: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemCell {
    pub model_id: String,
    /// False when no prediction file was configured or found; such cells
    /// stay empty and the sweep continues.
    pub present: bool,
    /// Metric name (including the averaged `conll` score) -> triple.
    pub scores: BTreeMap<String, ScoreTriple>,
    pub typed: BTreeMap<String, TypedCell>,
}

impl SystemCell {
    fn absent(model_id: &str) -> Self {
        SystemCell {
            model_id: model_id.to_string(),
            present: false,
            scores: BTreeMap::new(),
            typed: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetReport {
    pub dataset: String,
    pub split: String,
    pub documents: usize,
    /// Gold coreferring mentions after scope filtering.
    pub mentions: usize,
    /// Gold mentions satisfying each enabled type predicate.
    pub typed_mention_counts: BTreeMap<String, usize>,
    pub systems: Vec<SystemCell>,
    pub gaps: Vec<GapReport>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub types: Vec<String>,
    pub metrics: Vec<String>,
    pub datasets: Vec<DatasetReport>,
}

/// Report plus the underlying runs, so aggregates stay traceable to
/// per-document records.
#[derive(Debug, Clone)]
pub struct EvalOutcome {
    pub report: EvalReport,
    pub runs: Vec<ModelRun>,
}

/// Number of gold coreferring mentions satisfying the predicate.
/// Documents without parse alignment are skipped, matching the typed
/// scoring scope.
pub fn count_typed_mentions(corpus: &Corpus, predicate: &TypePredicate) -> usize {
    corpus
        .documents
        .iter()
        .filter(|doc| doc.is_parse_aligned())
        .map(|doc| {
            doc.gold
                .mentions()
                .filter(|(span, _)| predicate.matches(*span, &doc.gold, doc))
                .count()
        })
        .sum()
}

fn metric_counts(metric: Metric, gold: &EntityPartition, pred: &EntityPartition) -> PairCounts {
    match metric {
        Metric::BCubed => b_cubed_counts(gold, pred),
        Metric::Muc => muc_counts(gold, pred),
        Metric::CeafE => ceaf_e_counts(gold, pred),
    }
}

fn score_documents(
    gold: &Corpus,
    pred_by_id: &BTreeMap<&str, &EntityPartition>,
    metrics: &[Metric],
    predicates: &[TypePredicate],
) -> Vec<DocumentScores> {
    let empty = EntityPartition::empty();
    gold.documents
        .par_iter()
        .map(|doc| {
            let pred = pred_by_id
                .get(doc.doc_id.as_str())
                .copied()
                .unwrap_or(&empty);
            let mut counts = BTreeMap::new();
            for &metric in metrics {
                counts.insert(
                    ScoreKey::all(metric),
                    metric_counts(metric, &doc.gold, pred),
                );
            }
            for predicate in predicates {
                let key = ScoreKey::typed(Metric::BCubed, predicate.name());
                let pair = if doc.is_parse_aligned() {
                    b_cubed_typed_counts(&doc.gold, pred, predicate, doc)
                } else {
                    PairCounts::default()
                };
                counts.insert(key, pair);
            }
            DocumentScores {
                doc_id: doc.doc_id.clone(),
                counts,
            }
        })
        .collect()
}

fn system_cell(run: &ModelRun, metrics: &[Metric], types: &[String]) -> SystemCell {
    let mut scores = BTreeMap::new();
    for &metric in metrics {
        if let Some(triple) = run.corpus_scores.get(&ScoreKey::all(metric)) {
            scores.insert(metric.name().to_string(), *triple);
        }
    }
    if Metric::ALL.iter().all(|m| metrics.contains(m)) {
        let get = |m: Metric| run.corpus_scores[&ScoreKey::all(m)];
        let conll =
            ScoreTriple::mean_of(&[&get(Metric::BCubed), &get(Metric::Muc), &get(Metric::CeafE)]);
        scores.insert("conll".to_string(), conll);
    }
    let mut typed = BTreeMap::new();
    for type_name in types {
        if let Some(triple) = run
            .corpus_scores
            .get(&ScoreKey::typed(Metric::BCubed, type_name))
        {
            typed.insert(
                type_name.clone(),
                TypedCell {
                    score: *triple,
                    low_support: triple.support_gold < LOW_SUPPORT_THRESHOLD,
                },
            );
        }
    }
    SystemCell {
        model_id: run.model_id.clone(),
        present: true,
        scores,
        typed,
    }
}

fn check_prediction_bounds(gold: &Corpus, pred: &Corpus) -> Result<Vec<String>> {
    let mut notes = Vec::new();
    let gold_by_id: BTreeMap<&str, &Document> = gold
        .documents
        .iter()
        .map(|d| (d.doc_id.as_str(), d))
        .collect();
    for doc in &pred.documents {
        match gold_by_id.get(doc.doc_id.as_str()) {
            None => notes.push(format!(
                "prediction document '{}' not present in gold; ignored",
                doc.doc_id
            )),
            Some(gold_doc) => {
                for (span, _) in doc.gold.mentions() {
                    if !gold_doc.span_in_bounds(&span) {
                        return Err(Error::alignment(
                            &doc.doc_id,
                            format!("predicted mention {span} is out of the document's bounds"),
                        ));
                    }
                }
            }
        }
    }
    Ok(notes)
}

pub fn run_evaluation(cfg: &EvalConfig) -> Result<EvalOutcome> {
    cfg.validate()?;
    let metrics = cfg.enabled_metrics()?;
    let predicates = predicates_for_names(&cfg.types, &cfg.typing)?;
    let align_options = AlignOptions {
        normalization: cfg
            .normalization
            .clone()
            .unwrap_or_else(crate::ingest::default_normalization_table),
        mismatch_threshold: cfg.options.mismatch_threshold,
        allow_missing_parse: cfg.options.allow_missing_parse,
    };

    let mut datasets = Vec::with_capacity(cfg.datasets.len());
    let mut all_runs: Vec<ModelRun> = Vec::new();
    // (model, dataset) -> index into all_runs.
    let mut run_index: BTreeMap<(String, String), usize> = BTreeMap::new();

    for entry in &cfg.datasets {
        let mut notes = Vec::new();
        let parsed = parse_coref_path(&entry.gold, &IngestOptions::named(&entry.name))?;
        for warning in &parsed.warnings {
            notes.push(format!("gold: {warning}"));
        }
        let mut gold = parsed.corpus;

        match &entry.parses {
            Some(path) => {
                let deps = parse_dependency_path(path)?;
                for warning in align(&mut gold, &deps, &align_options)? {
                    notes.push(format!("align: {warning}"));
                }
            }
            None if !cfg.types.is_empty() && !cfg.options.allow_missing_parse => {
                return Err(Error::Config(format!(
                    "dataset '{}' has no parse sidecar but typed metrics are enabled \
                     (set allow_missing_parse to skip typed scoring)",
                    entry.name
                )));
            }
            None if !cfg.types.is_empty() => {
                notes.push("no parse sidecar; typed metrics skipped".to_string());
            }
            None => {}
        }

        let (gold, filter_stats) = filter_scope(gold);
        if filter_stats.anything_removed() {
            notes.push(format!(
                "scope filter removed {} discontinuous mention(s), {} singleton mention(s), {} cluster(s)",
                filter_stats.discontinuous_mentions_removed,
                filter_stats.singleton_mentions_removed,
                filter_stats.clusters_removed
            ));
        }

        let typed_mention_counts: BTreeMap<String, usize> = predicates
            .iter()
            .map(|p| (p.name().to_string(), count_typed_mentions(&gold, p)))
            .collect();

        let mut cells = Vec::with_capacity(cfg.systems.len());
        for system in &cfg.systems {
            let Some(path) = system.predictions.get(&entry.name) else {
                cells.push(SystemCell::absent(&system.model_id));
                continue;
            };
            if !path.exists() {
                notes.push(format!(
                    "prediction file {} for system '{}' is missing; cell left empty",
                    path.display(),
                    system.model_id
                ));
                cells.push(SystemCell::absent(&system.model_id));
                continue;
            }
            let parsed = parse_coref_path(
                path,
                &IngestOptions::named(format!("{}/{}", entry.name, system.model_id)),
            )?;
            for warning in &parsed.warnings {
                notes.push(format!("{}: {warning}", system.model_id));
            }
            let (pred, _) = filter_scope(parsed.corpus);
            notes.extend(check_prediction_bounds(&gold, &pred)?);
            let pred_by_id: BTreeMap<&str, &EntityPartition> = pred
                .documents
                .iter()
                .map(|d| (d.doc_id.as_str(), &d.gold))
                .collect();

            let doc_scores = score_documents(&gold, &pred_by_id, &metrics, &predicates);
            let run = ModelRun::from_document_scores(&system.model_id, &entry.name, doc_scores);
            cells.push(system_cell(&run, &metrics, &cfg.types));
            run_index.insert(
                (system.model_id.clone(), entry.name.clone()),
                all_runs.len(),
            );
            all_runs.push(run);
        }

        datasets.push(DatasetReport {
            dataset: entry.name.clone(),
            split: gold.split.to_string(),
            documents: gold.documents.len(),
            mentions: gold.mention_count(),
            typed_mention_counts,
            systems: cells,
            gaps: Vec::new(),
            notes,
        });
    }

    let gap_settings = GapSettings {
        metric: cfg.options.gap_metric,
        significance: cfg.significance,
        types: cfg.types.clone(),
    };

    match cfg.options.gap_orientation {
        GapOrientation::Appendix => {
            for (dataset, entry) in datasets.iter_mut().zip(&cfg.datasets) {
                let reference_id = match &cfg.options.gap_reference {
                    Some(id) => Some(id.clone()),
                    None => cfg
                        .systems
                        .iter()
                        .find(|s| s.in_domain == entry.name)
                        .map(|s| s.model_id.clone()),
                };
                let Some(reference_id) = reference_id else {
                    dataset
                        .notes
                        .push("no in-domain system; gap section skipped".to_string());
                    continue;
                };
                let Some(&ref_idx) = run_index.get(&(reference_id.clone(), entry.name.clone()))
                else {
                    dataset.notes.push(format!(
                        "gap reference '{reference_id}' has no run on this dataset; gap section skipped"
                    ));
                    continue;
                };
                let out_runs: Vec<&ModelRun> = cfg
                    .systems
                    .iter()
                    .filter(|s| s.model_id != reference_id)
                    .filter_map(|s| run_index.get(&(s.model_id.clone(), entry.name.clone())))
                    .map(|&i| &all_runs[i])
                    .collect();
                if !out_runs.is_empty() {
                    dataset.gaps = build_gap_report(&all_runs[ref_idx], &out_runs, &gap_settings)?;
                }
            }
        }
        GapOrientation::Body => {
            for (dataset, entry) in datasets.iter_mut().zip(&cfg.datasets) {
                let mut reports = Vec::new();
                for system in &cfg.systems {
                    if system.in_domain == entry.name {
                        continue;
                    }
                    let home = run_index.get(&(system.model_id.clone(), system.in_domain.clone()));
                    let here = run_index.get(&(system.model_id.clone(), entry.name.clone()));
                    if let (Some(&home), Some(&here)) = (home, here) {
                        reports.extend(build_gap_report(
                            &all_runs[home],
                            &[&all_runs[here]],
                            &gap_settings,
                        )?);
                    }
                }
                dataset.gaps = reports;
            }
        }
    }

    Ok(EvalOutcome {
        report: EvalReport {
            types: cfg.types.clone(),
            metrics: cfg.metrics.clone(),
            datasets,
        },
        runs: all_runs,
    })
}
