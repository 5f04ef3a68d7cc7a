//! Report rendering: markdown tables shaped like the published result
//! layouts, flat CSV records, and canonical JSON.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gaps::GapReport;
use crate::metrics::ScoreTriple;
use crate::report::harness::{DatasetReport, EvalReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Markdown,
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "md" | "markdown" => Ok(OutputFormat::Markdown),
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!(
                "unknown output format '{other}' (expected md, csv, or json)"
            ))),
        }
    }
}

/// One decimal, percentage scale; undefined values render blank.
fn pct(value: Option<f64>) -> String {
    value
        .map(|v| format!("{:.1}", v * 100.0))
        .unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Typed cells whose one-sided drop was significant: (out_model, type).
fn significant_cells(dataset: &DatasetReport) -> BTreeSet<(String, String)> {
    let mut cells = BTreeSet::new();
    for gap in &dataset.gaps {
        for (type_name, tg) in &gap.per_type {
            if tg.significant {
                cells.insert((gap.out_model.clone(), type_name.clone()));
            }
        }
    }
    cells
}

fn aggregate_row_order(metrics: &[String]) -> Vec<String> {
    let mut order = Vec::new();
    if metrics
        .iter()
        .all(|m| ["b_cubed", "muc", "ceaf_e"].contains(&m.as_str()))
        && metrics.len() == 3
    {
        order.push("conll".to_string());
    }
    if metrics.iter().any(|m| m == "b_cubed") {
        order.push("b_cubed".to_string());
    }
    for metric in metrics {
        if metric != "b_cubed" {
            order.push(metric.clone());
        }
    }
    order
}

fn markdown_dataset(out: &mut String, report: &EvalReport, dataset: &DatasetReport) {
    let _ = writeln!(
        out,
        "## {} ({} documents, {} mentions)\n",
        dataset.dataset, dataset.documents, dataset.mentions
    );

    let significant = significant_cells(dataset);

    let mut header = String::from("| Eval |");
    let mut rule = String::from("|---|");
    for cell in &dataset.systems {
        let _ = write!(
            header,
            " {} R | {} P | {} F1 |",
            cell.model_id, cell.model_id, cell.model_id
        );
        rule.push_str("---|---|---|");
    }
    header.push_str(" # Ments. |");
    rule.push_str("---|");
    let _ = writeln!(out, "{header}");
    let _ = writeln!(out, "{rule}");

    let push_triple = |row: &mut String, triple: Option<&ScoreTriple>, f1_mark: &str| match triple {
        Some(t) => {
            let f1 = pct(t.f1);
            let f1 = if f1.is_empty() || f1_mark.is_empty() {
                f1
            } else {
                format!("{f1_mark}{f1}{f1_mark}")
            };
            let _ = write!(row, " {} | {} | {} |", pct(t.recall), pct(t.precision), f1);
        }
        None => {
            let _ = write!(row, " | | |");
        }
    };

    for metric in aggregate_row_order(&report.metrics) {
        let mut row = format!("| {} ({}) |", dataset.dataset, metric);
        for cell in &dataset.systems {
            push_triple(&mut row, cell.scores.get(&metric), "");
        }
        if metric == "b_cubed" {
            let _ = write!(row, " {} |", dataset.mentions);
        } else {
            let _ = write!(row, " |");
        }
        let _ = writeln!(out, "{row}");
    }
    for type_name in &report.types {
        let mut row = format!("| &nbsp;&nbsp;{type_name} |");
        for cell in &dataset.systems {
            match cell.typed.get(type_name) {
                Some(tc) => {
                    let mark = if significant.contains(&(cell.model_id.clone(), type_name.clone()))
                    {
                        "**"
                    } else {
                        ""
                    };
                    push_triple(&mut row, Some(&tc.score), mark);
                    if tc.low_support && tc.score.f1.is_some() {
                        // Mark the F1 cell of low-support rows.
                        row.truncate(row.len() - 2);
                        row.push_str("† |");
                    }
                }
                None => {
                    let _ = write!(row, " | | |");
                }
            }
        }
        let count = dataset
            .typed_mention_counts
            .get(type_name)
            .map(|c| c.to_string())
            .unwrap_or_default();
        let _ = writeln!(out, "{row} {count} |");
    }
    out.push('\n');

    if !dataset.gaps.is_empty() {
        let in_model = &dataset.gaps[0].in_model;
        let _ = writeln!(out, "Gaps vs `{in_model}` (F1 points):\n");
        let mut header = String::from("| Scope |");
        let mut rule = String::from("|---|");
        for gap in &dataset.gaps {
            let _ = write!(header, " {} |", gap.out_model);
            rule.push_str("---|");
        }
        let _ = writeln!(out, "{header}");
        let _ = writeln!(out, "{rule}");
        let mut row = String::from("| all |");
        for gap in &dataset.gaps {
            let _ = write!(row, " {} |", pct(gap.agg));
        }
        let _ = writeln!(out, "{row}");
        for type_name in &report.types {
            let mut row = format!("| &nbsp;&nbsp;{type_name} |");
            for gap in &dataset.gaps {
                match gap.per_type.get(type_name) {
                    Some(tg) => {
                        let text = pct(tg.tgg);
                        let text = if tg.significant && !text.is_empty() {
                            format!("**{text}**")
                        } else {
                            text
                        };
                        let _ = write!(row, " {text} |");
                    }
                    None => {
                        let _ = write!(row, " |");
                    }
                }
            }
            let _ = writeln!(out, "{row}");
        }
        out.push('\n');
    }

    if !dataset.notes.is_empty() {
        for note in &dataset.notes {
            let _ = writeln!(out, "- note: {note}");
        }
        out.push('\n');
    }
}

fn emit_markdown(report: &EvalReport) -> String {
    let mut out = String::from("# Evaluation report\n\n");
    for dataset in &report.datasets {
        markdown_dataset(&mut out, report, dataset);
    }
    out
}

fn score_csv_rows(out: &mut String, report: &EvalReport) {
    let _ = writeln!(
        out,
        "dataset,split,system,metric,scope,recall,precision,f1,support_gold,support_pred,low_support,significant"
    );
    for dataset in &report.datasets {
        let significant = significant_cells(dataset);
        for cell in &dataset.systems {
            if !cell.present {
                continue;
            }
            for metric in aggregate_row_order(&report.metrics) {
                if let Some(t) = cell.scores.get(&metric) {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},all,{},{},{},{},{},,",
                        csv_field(&dataset.dataset),
                        dataset.split,
                        csv_field(&cell.model_id),
                        metric,
                        pct(t.recall),
                        pct(t.precision),
                        pct(t.f1),
                        t.support_gold,
                        t.support_pred
                    );
                }
            }
            for type_name in &report.types {
                if let Some(tc) = cell.typed.get(type_name) {
                    let t = &tc.score;
                    let _ = writeln!(
                        out,
                        "{},{},{},b_cubed,{},{},{},{},{},{},{},{}",
                        csv_field(&dataset.dataset),
                        dataset.split,
                        csv_field(&cell.model_id),
                        type_name,
                        pct(t.recall),
                        pct(t.precision),
                        pct(t.f1),
                        t.support_gold,
                        t.support_pred,
                        tc.low_support,
                        significant.contains(&(cell.model_id.clone(), type_name.clone()))
                    );
                }
            }
        }
    }
}

fn gap_csv_rows(out: &mut String, gaps: &[GapReport]) {
    let _ = writeln!(
        out,
        "test_set,in_model,out_model,scope,gap,p_value,significant"
    );
    for gap in gaps {
        let _ = writeln!(
            out,
            "{},{},{},all,{},,",
            csv_field(&gap.test_set),
            csv_field(&gap.in_model),
            csv_field(&gap.out_model),
            pct(gap.agg)
        );
        for (type_name, tg) in &gap.per_type {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                csv_field(&gap.test_set),
                csv_field(&gap.in_model),
                csv_field(&gap.out_model),
                type_name,
                pct(tg.tgg),
                tg.p_value.map(|p| format!("{p:.6}")).unwrap_or_default(),
                tg.significant
            );
        }
    }
}

fn emit_csv(report: &EvalReport) -> String {
    let mut out = String::new();
    score_csv_rows(&mut out, report);
    let gaps: Vec<GapReport> = report
        .datasets
        .iter()
        .flat_map(|d| d.gaps.iter().cloned())
        .collect();
    if !gaps.is_empty() {
        out.push('\n');
        gap_csv_rows(&mut out, &gaps);
    }
    out
}

/// One flat score record per (dataset, system, metric, scope) cell, as
/// JSON lines; the machine-readable counterpart of the CSV rows.
pub fn score_records_jsonl(report: &EvalReport) -> Result<String> {
    #[derive(serde::Serialize)]
    struct Record<'a> {
        dataset: &'a str,
        split: &'a str,
        system: &'a str,
        metric: &'a str,
        #[serde(rename = "type")]
        scope: &'a str,
        recall: Option<f64>,
        precision: Option<f64>,
        f1: Option<f64>,
        support_gold: usize,
        support_pred: usize,
    }
    let mut out = String::new();
    let mut push = |record: &Record| -> Result<()> {
        out.push_str(
            &serde_json::to_string(record)
                .map_err(|e| Error::Internal(format!("JSON encoding failed: {e}")))?,
        );
        out.push('\n');
        Ok(())
    };
    for dataset in &report.datasets {
        for cell in dataset.systems.iter().filter(|c| c.present) {
            for metric in aggregate_row_order(&report.metrics) {
                if let Some(t) = cell.scores.get(&metric) {
                    push(&Record {
                        dataset: &dataset.dataset,
                        split: &dataset.split,
                        system: &cell.model_id,
                        metric: &metric,
                        scope: "all",
                        recall: t.recall,
                        precision: t.precision,
                        f1: t.f1,
                        support_gold: t.support_gold,
                        support_pred: t.support_pred,
                    })?;
                }
            }
            for type_name in &report.types {
                if let Some(tc) = cell.typed.get(type_name) {
                    let t = &tc.score;
                    push(&Record {
                        dataset: &dataset.dataset,
                        split: &dataset.split,
                        system: &cell.model_id,
                        metric: "b_cubed",
                        scope: type_name,
                        recall: t.recall,
                        precision: t.precision,
                        f1: t.f1,
                        support_gold: t.support_gold,
                        support_pred: t.support_pred,
                    })?;
                }
            }
        }
    }
    Ok(out)
}

/// Renders the full report. JSON output is canonical: identical reports
/// serialize byte-identically and round-trip through `EvalReport`.
pub fn emit_report(report: &EvalReport, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Markdown => Ok(emit_markdown(report)),
        OutputFormat::Csv => Ok(emit_csv(report)),
        OutputFormat::Json => serde_json::to_string_pretty(report)
            .map(|mut s| {
                s.push('\n');
                s
            })
            .map_err(|e| Error::Internal(format!("JSON encoding failed: {e}"))),
    }
}

/// Renders a stand-alone batch of gap reports (the `gaps` subcommand).
pub fn emit_gap_reports(gaps: &[GapReport], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => serde_json::to_string_pretty(gaps)
            .map(|mut s| {
                s.push('\n');
                s
            })
            .map_err(|e| Error::Internal(format!("JSON encoding failed: {e}"))),
        OutputFormat::Csv => {
            let mut out = String::new();
            gap_csv_rows(&mut out, gaps);
            Ok(out)
        }
        OutputFormat::Markdown => {
            let mut out = String::new();
            let mut types: Vec<&String> = gaps
                .iter()
                .flat_map(|g| g.per_type.keys())
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            types.sort();
            let mut header = String::from("| Test set | Reference | Out model | all |");
            let mut rule = String::from("|---|---|---|---|");
            for t in &types {
                let _ = write!(header, " {t} |");
                rule.push_str("---|");
            }
            let _ = writeln!(out, "{header}");
            let _ = writeln!(out, "{rule}");
            for gap in gaps {
                let mut row = format!(
                    "| {} | {} | {} | {} |",
                    gap.test_set,
                    gap.in_model,
                    gap.out_model,
                    pct(gap.agg)
                );
                for t in &types {
                    match gap.per_type.get(t.as_str()) {
                        Some(tg) => {
                            let text = pct(tg.tgg);
                            let text = if tg.significant && !text.is_empty() {
                                format!("**{text}**")
                            } else {
                                text
                            };
                            let _ = write!(row, " {text} |");
                        }
                        None => {
                            let _ = write!(row, " |");
                        }
                    }
                }
                let _ = writeln!(out, "{row}");
            }
            Ok(out)
        }
    }
}
