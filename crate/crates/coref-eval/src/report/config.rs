//! Declarative evaluation config: a dataset registry, system entries with
//! prediction paths, enabled types and metrics, and significance settings.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaps::{GapMetric, SignificanceParams};
use crate::ingest::SplitRule;
use crate::metrics::Metric;
use crate::typing::{MentionType, TypingConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetEntry {
    pub name: String,
    pub gold: PathBuf,
    #[serde(default)]
    pub parses: Option<PathBuf>,
    #[serde(default = "default_split_rule")]
    pub split: SplitRule,
    #[serde(default)]
    pub seed: u64,
}

fn default_split_rule() -> SplitRule {
    SplitRule::Identity
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemEntry {
    pub model_id: String,
    /// The dataset this system was trained on; must name a registry entry.
    pub in_domain: String,
    /// Dataset name -> prediction file in bracket format.
    #[serde(default)]
    pub predictions: BTreeMap<String, PathBuf>,
}

/// Which way gap reports pair runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum GapOrientation {
    /// Per test set: the in-domain system's run is the reference and
    /// every other system's run on the same test set compares against it.
    /// Supports permutation significance (shared document set).
    #[default]
    Appendix,
    /// Per system: its run on its own in-domain test set is the
    /// reference and its runs on other test sets compare against it.
    /// Document sets differ, so no significance testing.
    Body,
}

impl std::str::FromStr for GapOrientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "appendix" => Ok(GapOrientation::Appendix),
            "body" => Ok(GapOrientation::Body),
            other => Err(Error::Config(format!(
                "unknown gap orientation '{other}' (expected body or appendix)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HarnessOptions {
    pub gap_orientation: GapOrientation,
    pub gap_metric: GapMetric,
    pub allow_missing_parse: bool,
    /// When set, this system's run is the gap reference on every test
    /// set, instead of the per-test-set in-domain system.
    pub gap_reference: Option<String>,
    pub mismatch_threshold: f64,
}

impl Default for HarnessOptions {
    fn default() -> Self {
        HarnessOptions {
            gap_orientation: GapOrientation::default(),
            gap_metric: GapMetric::default(),
            allow_missing_parse: false,
            gap_reference: None,
            mismatch_threshold: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    #[serde(rename = "dataset")]
    pub datasets: Vec<DatasetEntry>,
    #[serde(rename = "system")]
    pub systems: Vec<SystemEntry>,
    /// Enabled type predicates.
    #[serde(default = "default_types")]
    pub types: Vec<String>,
    /// Enabled cluster-agreement metrics; the averaged score is emitted
    /// when all three are enabled.
    #[serde(default = "default_metrics")]
    pub metrics: Vec<String>,
    #[serde(default)]
    pub significance: SignificanceParams,
    #[serde(default)]
    pub options: HarnessOptions,
    #[serde(default)]
    pub typing: TypingConfig,
    /// Token-form normalization overrides for alignment.
    #[serde(default)]
    pub normalization: Option<BTreeMap<String, String>>,
}

fn default_types() -> Vec<String> {
    vec![
        "nested".into(),
        "on_generic".into(),
        "compound".into(),
        "copular".into(),
    ]
}

fn default_metrics() -> Vec<String> {
    vec!["b_cubed".into(), "muc".into(), "ceaf_e".into()]
}

impl EvalConfig {
    pub fn enabled_metrics(&self) -> Result<Vec<Metric>> {
        self.metrics
            .iter()
            .map(|m| {
                if m == "conll" {
                    // The averaged row is derived, not configured.
                    return Err(Error::Config(
                        "'conll' is emitted automatically when b_cubed, muc, and ceaf_e \
                         are all enabled; do not list it under metrics"
                            .into(),
                    ));
                }
                m.parse()
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let mut names = std::collections::BTreeSet::new();
        for dataset in &self.datasets {
            if !names.insert(dataset.name.as_str()) {
                return Err(Error::Config(format!(
                    "duplicate dataset name '{}'",
                    dataset.name
                )));
            }
        }
        let mut ids = std::collections::BTreeSet::new();
        for system in &self.systems {
            if !ids.insert(system.model_id.as_str()) {
                return Err(Error::Config(format!(
                    "duplicate system id '{}'",
                    system.model_id
                )));
            }
            if !names.contains(system.in_domain.as_str()) {
                return Err(Error::Config(format!(
                    "system '{}' names in-domain dataset '{}' which is not in the registry",
                    system.model_id, system.in_domain
                )));
            }
            for key in system.predictions.keys() {
                if !names.contains(key.as_str()) {
                    return Err(Error::Config(format!(
                        "system '{}' has predictions for unknown dataset '{key}'",
                        system.model_id
                    )));
                }
            }
        }
        if let Some(reference) = &self.options.gap_reference {
            if !ids.contains(reference.as_str()) {
                return Err(Error::Config(format!(
                    "gap_reference '{reference}' is not a configured system"
                )));
            }
        }
        let mut types = std::collections::BTreeSet::new();
        for t in &self.types {
            t.parse::<MentionType>()?;
            if !types.insert(t.as_str()) {
                return Err(Error::Config(format!("duplicate type '{t}'")));
            }
        }
        let metrics = self.enabled_metrics()?;
        let mut seen = std::collections::BTreeSet::new();
        for metric in metrics {
            if !seen.insert(metric) {
                return Err(Error::Config(format!("duplicate metric '{metric}'")));
            }
        }
        Ok(())
    }

    /// Resolves relative paths against the config file's directory.
    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&p);
            }
        };
        for dataset in &mut self.datasets {
            fix(&mut dataset.gold);
            if let Some(parses) = &mut dataset.parses {
                fix(parses);
            }
        }
        for system in &mut self.systems {
            for path in system.predictions.values_mut() {
                fix(path);
            }
        }
    }
}

pub fn load_config(path: &Path) -> Result<EvalConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut cfg: EvalConfig =
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    if let Some(base) = path.parent() {
        cfg.resolve_paths(base);
    }
    cfg.validate()?;
    Ok(cfg)
}
