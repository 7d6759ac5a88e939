//! TOML documents for experiments and one-shot requests.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::shrinkage::{default_tau_grid, CvConfig};
use crate::simgen::Scenario;
use crate::spectral::{EllipticalGenerator, EstimatorKind};
use crate::{Error, Result};

fn default_replications() -> usize {
    1
}

fn default_splits() -> usize {
    10
}

fn default_gamma() -> f64 {
    1.5
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    Gaussian,
    Stable { alpha: f64 },
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<EllipticalGenerator<f64>> {
        match self {
            GeneratorSpec::Gaussian => Ok(EllipticalGenerator::gaussian()),
            GeneratorSpec::Stable { alpha } => EllipticalGenerator::stable(*alpha),
        }
    }
}

/// One estimator column of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSpec {
    pub kind: EstimatorKind,
    /// Name in the output; defaults to the kind tag.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
    /// Explicit threshold; otherwise cross-validated when a `[cv]` table is
    /// present, otherwise the theory value `τ(U)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    /// Log-det barrier weight for `sps`/`pds` (default `1e-4`), nuclear
    /// penalty for `lowrank` (default: heuristic theory level).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc_samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psd_constrained: Option<bool>,
}

impl EstimatorSpec {
    pub fn new(kind: EstimatorKind) -> Self {
        Self {
            kind,
            label: None,
            u: None,
            tau: None,
            lambda: None,
            generator: None,
            mc_samples: None,
            psd_constrained: None,
        }
    }

    pub fn with_u(mut self, u: f64) -> Self {
        self.u = Some(u);
        self
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = Some(tau);
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.kind.as_str().to_string())
    }

    pub fn needs_radius(&self) -> bool {
        !matches!(self.kind, EstimatorKind::Sample | EstimatorKind::Pds)
    }

    pub fn is_thresholded(&self) -> bool {
        matches!(self.kind, EstimatorKind::Hard | EstimatorKind::Soft | EstimatorKind::Sps | EstimatorKind::Pds)
    }

    /// Structural checks that do not depend on the data.
    pub fn validate(&self) -> Result<()> {
        let name = self.label();
        let positive = |v: Option<f64>, what: &str| match v {
            Some(x) if !(x > 0.0 && x.is_finite()) => Err(Error::Config(format!("{name}: {what} must be positive"))),
            _ => Ok(()),
        };
        positive(self.u, "u")?;
        positive(self.lambda, "lambda")?;
        if let Some(t) = self.tau {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::Config(format!("{name}: tau must be non-negative")));
            }
        }
        if self.needs_radius() && self.u.is_none() {
            return Err(Error::Config(format!("{name}: spectral radius u is required")));
        }
        if self.mc_samples == Some(0) {
            return Err(Error::Config(format!("{name}: mc_samples must be positive")));
        }
        if self.kind == EstimatorKind::Elliptical {
            self.generator.unwrap_or(GeneratorSpec::Gaussian).build()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CvSpec {
    #[serde(default = "default_splits")]
    pub num_splits: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub seed: u64,
}

impl Default for CvSpec {
    fn default() -> Self {
        Self { num_splits: default_splits(), tau_grid: None, seed: 0 }
    }
}

impl CvSpec {
    pub fn config(&self, seed: u64) -> Result<CvConfig<f64>> {
        CvConfig::new(self.num_splits, self.tau_grid.clone().unwrap_or_else(default_tau_grid), seed)
    }
}

/// Constants for the theory threshold, the admissibility flag and the
/// low-rank penalty. Unset values come from the scenario when simulating.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheorySpec {
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_noise: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Spectral-norm proxy for the low-rank penalty.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_norm: Option<f64>,
}

impl Default for TheorySpec {
    fn default() -> Self {
        Self { gamma: default_gamma(), r_bound: None, t_noise: None, beta: None, sigma_norm: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<PathBuf>,
    /// When false, wall times are written as 0 so reruns are byte-identical.
    #[serde(default = "default_true")]
    pub timing: bool,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { csv: None, summary: None, timing: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub scenario: Scenario,
    pub estimators: Vec<EstimatorSpec>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cv: Option<CvSpec>,
    #[serde(default)]
    pub theory: TheorySpec,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if self.estimators.is_empty() {
            return Err(Error::Config("at least one estimator is required".into()));
        }
        self.scenario.validate().map_err(|e| Error::Config(format!("scenario: {e}")))?;
        let mut seen = HashSet::new();
        for e in &self.estimators {
            e.validate()?;
            if !seen.insert(e.label()) {
                return Err(Error::Config(format!("duplicate estimator label {}", e.label())));
            }
            if e.kind == EstimatorKind::Pds && e.tau.is_none() && self.cv.is_none() && e.u.is_none() {
                return Err(Error::Config(format!("{}: needs tau, a [cv] table, or u for the theory value", e.label())));
            }
        }
        if let Some(cv) = &self.cv {
            cv.config(0).map_err(|e| Error::Config(format!("cv: {e}")))?;
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: Self = parse_document(text.parse().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path).map_err(Error::io_at(path))?)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }
}

/// One-shot estimation on a data file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateRequest {
    pub data: PathBuf,
    pub estimator: EstimatorSpec,
    #[serde(default)]
    pub theory: TheorySpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cv: Option<CvSpec>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

/// Threshold cross-validation on a data file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CvRequest {
    pub data: PathBuf,
    /// One of `hard`, `soft`, `sps`, `pds`.
    pub rule: EstimatorKind,
    pub u: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub cv: CvSpec,
}

/// Table of theory constants over a list of sample sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatesRequest {
    pub p: usize,
    pub n: Vec<usize>,
    pub r_bound: f64,
    pub t_noise: f64,
    pub beta: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    /// Sparsity `S`; defaults to `p`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sparsity: Option<f64>,
    #[serde(default)]
    pub q: f64,
    /// Fixed radius; when unset `U*` is used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
}

/// Deserialises a parsed document into a request type.
pub fn parse_document<R: DeserializeOwned>(doc: toml::Table) -> Result<R> {
    R::deserialize(toml::Value::Table(doc)).map_err(|e| Error::Config(e.to_string()))
}

pub fn load_document(path: Option<&Path>) -> Result<toml::Table> {
    match path {
        None => Ok(toml::Table::new()),
        Some(p) => std::fs::read_to_string(p).map_err(Error::io_at(p))?
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(format!("{}: {e}", p.display()))),
    }
}

/// Parses an override value as a TOML literal, falling back to a string.
pub fn parse_value(raw: &str) -> toml::Value {
    let probe = format!("v = {raw}");
    match probe.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(raw.to_string())),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

/// Sets a dotted key such as `scenario.noise.theta` or `estimators.0.tau`.
pub fn set_key(doc: &mut toml::Table, key: &str, value: toml::Value) -> Result<()> {
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(format!("malformed key {key:?}")));
    }
    let mut cur = doc;
    for (depth, part) in parts.iter().enumerate() {
        let last = depth + 1 == parts.len();
        if last {
            cur.insert(part.to_string(), value);
            return Ok(());
        }
        let next = cur
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = match next {
            toml::Value::Table(t) => t,
            toml::Value::Array(items) => {
                let idx: usize = parts[depth + 1]
                    .parse()
                    .map_err(|_| Error::Config(format!("{key}: expected an index after {part}")))?;
                let len = items.len();
                let slot = items
                    .get_mut(idx)
                    .ok_or_else(|| Error::Config(format!("{key}: index {idx} out of range ({len} entries)")))?;
                // skip the index component
                return match slot {
                    toml::Value::Table(t) => {
                        let rest = parts[depth + 2..].join(".");
                        if rest.is_empty() {
                            *slot = value;
                            Ok(())
                        } else {
                            set_key(t, &rest, value)
                        }
                    }
                    _ if depth + 2 == parts.len() => {
                        *slot = value;
                        Ok(())
                    }
                    _ => Err(Error::Config(format!("{key}: entry {idx} is not a table"))),
                };
            }
            _ => return Err(Error::Config(format!("{key}: {part} is not a table"))),
        };
    }
    Ok(())
}

/// Applies `key=value` overrides in order.
pub fn apply_overrides(doc: &mut toml::Table, overrides: &[String]) -> Result<()> {
    for o in overrides {
        let (k, v) = o
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override {o:?} is not key=value")))?;
        set_key(doc, k.trim(), parse_value(v.trim()))?;
    }
    Ok(())
}
