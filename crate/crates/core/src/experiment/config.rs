use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{ClusteredInstance, ValidationMode};
use crate::policy::{PolicyKind, PolicyParams};
use crate::sim::{PolicySpec, RecordingGrid};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyConfig {
    pub kind: PolicyKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub update_interval: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

impl PolicyConfig {
    pub fn new(kind: PolicyKind) -> Self {
        Self {
            kind,
            label: None,
            a: None,
            update_interval: None,
            tol: None,
        }
    }
}

/// Experiment file as written by hand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<ClusteredInstance>,
    /// Instance JSON file, relative to the config file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance_path: Option<PathBuf>,
    /// Widths handed to the policies; the instance's widths when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared_widths: Option<Vec<f64>>,
    /// Runs the whole experiment once per width vector.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width_sweep: Option<Vec<Vec<f64>>>,
    pub policies: Vec<PolicyConfig>,
    pub horizon: u64,
    pub replications: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub grid: RecordingGrid,
    #[serde(default)]
    pub validation: ValidationMode,
}

/// Command-line overrides applied on top of a config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub strict: bool,
    pub seed: Option<u64>,
    pub replications: Option<usize>,
    pub horizon: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedPolicy {
    pub label: String,
    pub kind: PolicyKind,
    pub a: f64,
    pub update_interval: u64,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WidthVariant {
    /// Subdirectory name; empty for a config without a sweep.
    pub label: String,
    pub widths: Vec<f64>,
}

/// Fully defaulted experiment; this is what gets recorded next to the outputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedExperiment {
    pub schema_version: u32,
    pub name: String,
    pub instance: ClusteredInstance,
    pub variants: Vec<WidthVariant>,
    pub policies: Vec<ResolvedPolicy>,
    pub horizon: u64,
    pub replications: usize,
    pub base_seed: u64,
    pub grid: RecordingGrid,
    pub validation: ValidationMode,
    #[serde(skip)]
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg: Self = serde_json::from_str(&text)?;
        if let (Some(rel), Some(dir)) = (&cfg.instance_path, path.parent()) {
            if rel.is_relative() {
                cfg.instance_path = Some(dir.join(rel));
            }
        }
        Ok(cfg)
    }

    pub fn resolve(&self, overrides: &Overrides) -> Result<ResolvedExperiment> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidParameter(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let instance = match (&self.instance, &self.instance_path) {
            (Some(inst), None) => inst.clone(),
            (None, Some(path)) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
            _ => {
                return Err(Error::InvalidParameter(
                    "exactly one of `instance` and `instance_path` is required".into(),
                ))
            }
        };
        let validation = if overrides.strict {
            ValidationMode::Strict
        } else {
            self.validation
        };
        let variants = match (&self.width_sweep, &self.declared_widths) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidParameter(
                    "`declared_widths` and `width_sweep` are mutually exclusive".into(),
                ))
            }
            (Some(sweep), None) => {
                if sweep.is_empty() {
                    return Err(Error::InvalidParameter("`width_sweep` is empty".into()));
                }
                sweep
                    .iter()
                    .map(|w| WidthVariant {
                        label: widths_label(w),
                        widths: w.clone(),
                    })
                    .collect()
            }
            (None, Some(w)) => vec![WidthVariant {
                label: String::new(),
                widths: w.clone(),
            }],
            (None, None) => vec![WidthVariant {
                label: String::new(),
                widths: instance.widths(),
            }],
        };
        for v in &variants {
            instance.with_widths(&v.widths)?.validate(validation)?;
        }
        if self.policies.is_empty() {
            return Err(Error::InvalidParameter("no policies configured".into()));
        }
        let policies = self
            .policies
            .iter()
            .map(|p| {
                let defaults = PolicyParams::new(p.kind, Vec::new());
                ResolvedPolicy {
                    label: p.label.clone().unwrap_or_else(|| p.kind.name().to_owned()),
                    kind: p.kind,
                    a: p.a.unwrap_or(defaults.a),
                    update_interval: p.update_interval.unwrap_or(defaults.update_interval),
                    tol: p.tol.unwrap_or(defaults.tol),
                }
            })
            .collect::<Vec<_>>();
        let mut labels: Vec<_> = policies.iter().map(|p| p.label.as_str()).collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter(
                "policy labels must be unique".into(),
            ));
        }
        let horizon = overrides.horizon.unwrap_or(self.horizon);
        if horizon < instance.num_arms() as u64 {
            return Err(Error::HorizonTooShort {
                horizon,
                arms: instance.num_arms(),
            });
        }
        let replications = overrides.replications.unwrap_or(self.replications);
        if replications == 0 {
            return Err(Error::InvalidParameter(
                "replications must be at least 1".into(),
            ));
        }
        let output_dir = overrides
            .out
            .clone()
            .or_else(|| self.output_dir.clone())
            .unwrap_or_else(|| PathBuf::from("out").join(&self.name));
        Ok(ResolvedExperiment {
            schema_version: SCHEMA_VERSION,
            name: self.name.clone(),
            instance,
            variants,
            policies,
            horizon,
            replications,
            base_seed: overrides.seed.unwrap_or(self.base_seed),
            grid: self.grid.clone(),
            validation,
            output_dir,
        })
    }
}

fn widths_label(w: &[f64]) -> String {
    let parts: Vec<String> = w.iter().map(|x| format!("{x}")).collect();
    format!("beta_{}", parts.join("_"))
}

impl ResolvedExperiment {
    pub fn policy_spec(&self, policy: &ResolvedPolicy, widths: &[f64]) -> PolicySpec {
        let params = PolicyParams::new(policy.kind, widths.to_vec())
            .a(policy.a)
            .update_interval(policy.update_interval)
            .tol(policy.tol);
        PolicySpec::new(policy.kind, params).labeled(policy.label.clone())
    }

    /// Output directory and instance id of a width variant.
    pub fn variant_target(&self, variant: &WidthVariant) -> (PathBuf, String) {
        if variant.label.is_empty() {
            (self.output_dir.clone(), self.name.clone())
        } else {
            (
                self.output_dir.join(&variant.label),
                format!("{}/{}", self.name, variant.label),
            )
        }
    }
}
