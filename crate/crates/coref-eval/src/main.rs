//! Command-line front end: score coreference system outputs, disaggregate
//! by mention type, compute generalization gaps, run config-driven
//! sweeps, and validate inputs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use coref_eval::gaps::{build_gap_report, GapMetric, GapSettings, SignificanceParams};
use coref_eval::ingest::{
    align, corpus_to_jsonl, filter_scope, parse_coref_path, parse_dependency_path, split_corpus,
    AlignOptions, IngestOptions,
};
use coref_eval::report::{
    emit_gap_reports, emit_report, load_config, run_evaluation, DatasetEntry, EvalConfig,
    GapOrientation, HarnessOptions, SystemEntry,
};
use coref_eval::{Error, Result};

#[derive(Parser)]
#[command(
    name = "coref-eval",
    version,
    about = "Score coreference system outputs, disaggregate by mention type, and measure generalization gaps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FormatArg {
    /// Output format: md, csv, or json.
    #[arg(long, default_value = "md")]
    format: String,
}

#[derive(Args)]
struct SignificanceArgs {
    /// Number of permutations for significance testing.
    #[arg(long, default_value_t = 10_000)]
    n_perms: usize,
    /// Significance level for the permutation test.
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    /// Seed for all randomized steps.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Score one system file against one gold file.
    Score {
        gold: PathBuf,
        system: PathBuf,
        /// Dependency sidecar; enables typed rows when --types is given.
        #[arg(long)]
        parses: Option<PathBuf>,
        /// Comma-separated mention types to score.
        #[arg(long, value_delimiter = ',')]
        types: Vec<String>,
        #[arg(long)]
        allow_missing_parse: bool,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Score with type-disaggregated rows (requires a parse sidecar).
    TypedScore {
        gold: PathBuf,
        system: PathBuf,
        #[arg(long)]
        parses: PathBuf,
        /// Comma-separated mention types (default: nested, on_generic,
        /// compound, copular).
        #[arg(long, value_delimiter = ',')]
        types: Vec<String>,
        #[arg(long)]
        allow_missing_parse: bool,
        /// Write typed-mention audit records (JSON lines) here.
        #[arg(long)]
        dump_typed: Option<PathBuf>,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Generalization gaps of out-of-domain runs against an in-domain run
    /// on one gold test set.
    Gaps {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        parses: Option<PathBuf>,
        /// Prediction file of the in-domain system.
        #[arg(long)]
        in_sys: PathBuf,
        /// Prediction file(s) of out-of-domain systems (repeatable).
        #[arg(long = "out-sys", required = true)]
        out_sys: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        types: Vec<String>,
        /// Metric the gaps are computed on: b_cubed or conll.
        #[arg(long, default_value = "b_cubed")]
        gap_metric: String,
        #[arg(long)]
        allow_missing_parse: bool,
        #[command(flatten)]
        significance: SignificanceArgs,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Full multi-dataset, multi-system sweep from a config file.
    Report {
        #[arg(long)]
        config: PathBuf,
        /// Override the config's significance seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the config's permutation count.
        #[arg(long)]
        n_perms: Option<usize>,
        /// Override the config's significance level.
        #[arg(long)]
        alpha: Option<f64>,
        /// Gap pairing: appendix (per test set, vs the in-domain system)
        /// or body (per system, vs its home test set).
        #[arg(long)]
        gap_orientation: Option<String>,
        /// Also write flat score records (JSON lines) to this path.
        #[arg(long)]
        dump_records: Option<PathBuf>,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Ingest and alignment checks only; prints corpus statistics.
    Validate {
        gold: PathBuf,
        #[arg(long)]
        parses: Option<PathBuf>,
        #[arg(long)]
        allow_missing_parse: bool,
        /// Split rule to preview (identity, take-last-dev:N,
        /// random-dev:N, percent:A/B/C).
        #[arg(long)]
        split: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Dump the parsed corpus as JSON lines to this path.
        #[arg(long)]
        dump_jsonl: Option<PathBuf>,
    },
}

fn dataset_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string())
}

fn model_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "system".to_string())
}

/// Builds a single-dataset config so `score`/`typed-score` share the
/// harness code path with `report`.
#[allow(clippy::too_many_arguments)]
fn adhoc_config(
    gold: &Path,
    systems: &[(String, PathBuf)],
    parses: Option<&Path>,
    types: Vec<String>,
    allow_missing_parse: bool,
    gap_metric: GapMetric,
    significance: SignificanceParams,
) -> EvalConfig {
    let name = dataset_name(gold);
    EvalConfig {
        datasets: vec![DatasetEntry {
            name: name.clone(),
            gold: gold.to_path_buf(),
            parses: parses.map(Path::to_path_buf),
            split: coref_eval::ingest::SplitRule::Identity,
            seed: 0,
        }],
        systems: systems
            .iter()
            .map(|(id, path)| SystemEntry {
                model_id: id.clone(),
                in_domain: name.clone(),
                predictions: BTreeMap::from([(name.clone(), path.clone())]),
            })
            .collect(),
        types,
        metrics: vec!["b_cubed".into(), "muc".into(), "ceaf_e".into()],
        significance,
        options: HarnessOptions {
            gap_orientation: GapOrientation::Appendix,
            gap_metric,
            allow_missing_parse,
            gap_reference: None,
            mismatch_threshold: 0.05,
        },
        typing: Default::default(),
        normalization: None,
    }
}

fn cmd_score(
    gold: &Path,
    system: &Path,
    parses: Option<&Path>,
    types: Vec<String>,
    allow_missing_parse: bool,
    format: &str,
) -> Result<()> {
    if !types.is_empty() && parses.is_none() {
        return Err(Error::Config(
            "typed scoring needs a dependency sidecar; pass --parses".into(),
        ));
    }
    let cfg = adhoc_config(
        gold,
        &[(model_id(system), system.to_path_buf())],
        parses,
        types,
        allow_missing_parse,
        GapMetric::BCubed,
        SignificanceParams::default(),
    );
    let outcome = run_evaluation(&cfg)?;
    print!("{}", emit_report(&outcome.report, format.parse()?)?);
    Ok(())
}

fn default_types() -> Vec<String> {
    vec![
        "nested".into(),
        "on_generic".into(),
        "compound".into(),
        "copular".into(),
    ]
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Score {
            gold,
            system,
            parses,
            types,
            allow_missing_parse,
            format,
        } => cmd_score(
            &gold,
            &system,
            parses.as_deref(),
            types,
            allow_missing_parse,
            &format.format,
        ),
        Command::TypedScore {
            gold,
            system,
            parses,
            types,
            allow_missing_parse,
            dump_typed,
            format,
        } => {
            let types = if types.is_empty() {
                default_types()
            } else {
                types
            };
            let cfg = adhoc_config(
                &gold,
                &[(model_id(&system), system.clone())],
                Some(parses.as_path()),
                types,
                allow_missing_parse,
                GapMetric::BCubed,
                SignificanceParams::default(),
            );
            let outcome = run_evaluation(&cfg)?;
            if let Some(path) = dump_typed {
                dump_typed_mentions(&cfg, &path)?;
            }
            print!("{}", emit_report(&outcome.report, format.format.parse()?)?);
            Ok(())
        }
        Command::Gaps {
            gold,
            parses,
            in_sys,
            out_sys,
            types,
            gap_metric,
            allow_missing_parse,
            significance,
            format,
        } => {
            let types = if types.is_empty() {
                default_types()
            } else {
                types
            };
            let gap_metric: GapMetric = gap_metric.parse()?;
            let params = SignificanceParams {
                n_perms: significance.n_perms,
                alpha: significance.alpha,
                seed: significance.seed,
            };
            let mut systems = vec![(model_id(&in_sys), in_sys.clone())];
            systems.extend(out_sys.iter().map(|p| (model_id(p), p.clone())));
            // File stems can collide; disambiguate ids positionally.
            let mut seen = std::collections::BTreeMap::new();
            for (id, _) in &mut systems {
                let n = seen.entry(id.clone()).or_insert(0usize);
                *n += 1;
                if *n > 1 {
                    *id = format!("{id}_{n}");
                }
            }
            let cfg = adhoc_config(
                &gold,
                &systems,
                parses.as_deref(),
                types.clone(),
                allow_missing_parse,
                gap_metric,
                params,
            );
            let outcome = run_evaluation(&cfg)?;
            let in_id = model_id(&in_sys);
            let in_run = outcome
                .runs
                .iter()
                .find(|r| r.model_id == in_id)
                .ok_or_else(|| Error::Config(format!("no run for in-domain system '{in_id}'")))?;
            let out_runs: Vec<_> = outcome
                .runs
                .iter()
                .filter(|r| r.model_id != in_id)
                .collect();
            let settings = GapSettings {
                metric: gap_metric,
                significance: params,
                types,
            };
            let reports = build_gap_report(in_run, &out_runs, &settings)?;
            print!("{}", emit_gap_reports(&reports, format.format.parse()?)?);
            Ok(())
        }
        Command::Report {
            config,
            seed,
            n_perms,
            alpha,
            gap_orientation,
            dump_records,
            format,
        } => {
            let mut cfg = load_config(&config)?;
            if let Some(seed) = seed {
                cfg.significance.seed = seed;
            }
            if let Some(n_perms) = n_perms {
                cfg.significance.n_perms = n_perms;
            }
            if let Some(alpha) = alpha {
                cfg.significance.alpha = alpha;
            }
            if let Some(orientation) = gap_orientation {
                cfg.options.gap_orientation = orientation.parse()?;
            }
            let outcome = run_evaluation(&cfg)?;
            if let Some(path) = dump_records {
                std::fs::write(
                    &path,
                    coref_eval::report::score_records_jsonl(&outcome.report)?,
                )
                .map_err(|e| Error::io(&path, e))?;
            }
            print!("{}", emit_report(&outcome.report, format.format.parse()?)?);
            Ok(())
        }
        Command::Validate {
            gold,
            parses,
            allow_missing_parse,
            split,
            seed,
            dump_jsonl,
        } => cmd_validate(
            &gold,
            parses.as_deref(),
            allow_missing_parse,
            split.as_deref(),
            seed,
            dump_jsonl.as_deref(),
        ),
    }
}

fn dump_typed_mentions(cfg: &EvalConfig, path: &Path) -> Result<()> {
    use coref_eval::typing::{type_all, typed_mentions_to_jsonl, PartitionOrigin};
    let entry = &cfg.datasets[0];
    let parsed = parse_coref_path(&entry.gold, &IngestOptions::named(&entry.name))?;
    let mut corpus = parsed.corpus;
    if let Some(dep_path) = &entry.parses {
        let deps = parse_dependency_path(dep_path)?;
        align(
            &mut corpus,
            &deps,
            &AlignOptions {
                allow_missing_parse: cfg.options.allow_missing_parse,
                ..AlignOptions::default()
            },
        )?;
    }
    let (corpus, _) = filter_scope(corpus);
    let mut out = String::new();
    for doc in &corpus.documents {
        if !doc.is_parse_aligned() {
            continue;
        }
        let typed = type_all(doc, &doc.gold, PartitionOrigin::Gold, &cfg.typing)?;
        out.push_str(&typed_mentions_to_jsonl(&doc.doc_id, &typed)?);
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))?;
    Ok(())
}

fn cmd_validate(
    gold: &Path,
    parses: Option<&Path>,
    allow_missing_parse: bool,
    split: Option<&str>,
    seed: u64,
    dump_jsonl: Option<&Path>,
) -> Result<()> {
    let parsed = parse_coref_path(gold, &IngestOptions::named(dataset_name(gold)))?;
    let mut corpus = parsed.corpus;
    for warning in &parsed.warnings {
        eprintln!("warning: {warning}");
    }
    if let Some(dep_path) = parses {
        let deps = parse_dependency_path(dep_path)?;
        let warnings = align(
            &mut corpus,
            &deps,
            &AlignOptions {
                allow_missing_parse,
                ..AlignOptions::default()
            },
        )?;
        for warning in &warnings {
            eprintln!("warning: {warning}");
        }
    }
    corpus.validate()?;

    let documents = corpus.documents.len();
    let sentences: usize = corpus.documents.iter().map(|d| d.sentences.len()).sum();
    let tokens: usize = corpus.documents.iter().map(|d| d.word_count()).sum();
    let clusters: usize = corpus
        .documents
        .iter()
        .map(|d| d.gold.cluster_count())
        .sum();
    let mentions = corpus.mention_count();
    println!("documents: {documents}");
    println!("sentences: {sentences}");
    println!("tokens: {tokens}");
    println!("clusters: {clusters}");
    println!("mentions: {mentions}");
    let aligned = corpus
        .documents
        .iter()
        .filter(|d| d.is_parse_aligned())
        .count();
    println!("parse-aligned documents: {aligned}");

    let (filtered, stats) = filter_scope(corpus);
    println!(
        "after scope filter: {} clusters, {} mentions ({} singleton mention(s) and {} cluster(s) removed)",
        filtered.documents.iter().map(|d| d.gold.cluster_count()).sum::<usize>(),
        filtered.mention_count(),
        stats.singleton_mentions_removed,
        stats.clusters_removed
    );

    if let Some(rule) = split {
        let rule = rule.parse()?;
        let splits = split_corpus(&filtered, &rule, seed)?;
        println!(
            "split preview ({rule}): train {} / dev {} / test {}",
            splits.train.documents.len(),
            splits.dev.documents.len(),
            splits.test.documents.len()
        );
    }

    if let Some(path) = dump_jsonl {
        std::fs::write(path, corpus_to_jsonl(&filtered)?).map_err(|e| Error::io(path, e))?;
        println!("wrote JSON-lines dump to {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are not errors.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
