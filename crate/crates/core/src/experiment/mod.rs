//! Experiment orchestration behind the `clus-ucb` binary.
//!
//! Output layout for `simulate` (per width variant directory):
//!
//! * `traces_<policy>.csv`: `policy,instance_id,replication,seed,n,pseudo_regret`
//! * `summary.csv`: `policy,instance_id,n,mean_regret,stderr,replications`
//! * `pulls.csv`: `policy,cluster,arm,mean_pulls,predicted_pulls`
//! * `resolved_config.json`: the fully defaulted experiment
//!
//! `bound` writes `bound_report.json` into the same directories.

pub mod config;
pub mod plot;

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bounds::{clus_lower_bound, BoundReport};
use crate::error::{Error, Result};
use crate::sim::{self, BatchSpec, Execution, MonteCarloSummary};

pub use config::{ExperimentConfig, Overrides, PolicyConfig, ResolvedExperiment};
pub use plot::{render_svg, PlotOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub policy: String,
    pub instance_id: String,
    pub replication: usize,
    pub seed: u64,
    pub n: u64,
    pub pseudo_regret: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub policy: String,
    pub instance_id: String,
    pub n: u64,
    pub mean_regret: f64,
    pub stderr: f64,
    pub replications: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PullRow {
    pub policy: String,
    pub cluster: usize,
    pub arm: usize,
    pub mean_pulls: f64,
    pub predicted_pulls: Option<f64>,
}

/// One labelled curve read back from a summary CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SummarySeries {
    pub policy: String,
    pub instance_id: String,
    pub n: Vec<u64>,
    pub mean_regret: Vec<f64>,
    pub stderr: Vec<f64>,
    pub replications: usize,
}

pub fn summary_rows(policy: &str, instance_id: &str, s: &MonteCarloSummary) -> Vec<SummaryRow> {
    s.grid
        .iter()
        .zip(&s.mean_regret)
        .zip(&s.stderr)
        .map(|((&n, &m), &e)| SummaryRow {
            policy: policy.to_owned(),
            instance_id: instance_id.to_owned(),
            n,
            mean_regret: m,
            stderr: e,
            replications: s.replications,
        })
        .collect()
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a summary CSV into one series per `(instance_id, policy)`, in file order.
pub fn read_summary_csv(path: &Path) -> Result<Vec<SummarySeries>> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut out: Vec<SummarySeries> = Vec::new();
    for row in reader.deserialize::<SummaryRow>() {
        let row = row?;
        let pos = out
            .iter()
            .position(|s| s.policy == row.policy && s.instance_id == row.instance_id);
        let series = match pos {
            Some(i) => &mut out[i],
            None => {
                out.push(SummarySeries {
                    policy: row.policy.clone(),
                    instance_id: row.instance_id.clone(),
                    n: Vec::new(),
                    mean_regret: Vec::new(),
                    stderr: Vec::new(),
                    replications: row.replications,
                });
                out.last_mut().unwrap()
            }
        };
        series.n.push(row.n);
        series.mean_regret.push(row.mean_regret);
        series.stderr.push(row.stderr);
    }
    if out.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "{} has no summary rows",
            path.display()
        )));
    }
    Ok(out)
}

/// Writes `resolved_config.json`; returns true when an earlier run in the same
/// directory recorded a different configuration.
fn record_config(dir: &Path, resolved: &ResolvedExperiment) -> Result<bool> {
    let path = dir.join("resolved_config.json");
    let text = serde_json::to_string_pretty(resolved)? + "\n";
    let drift = match fs::read_to_string(&path) {
        Ok(prev) => prev != text,
        Err(_) => false,
    };
    fs::write(&path, text)?;
    Ok(drift)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundOutput {
    pub path: PathBuf,
    pub report: BoundReport,
}

/// Computes and writes `bound_report.json` for every width variant.
pub fn cmd_bound(resolved: &ResolvedExperiment) -> Result<Vec<BoundOutput>> {
    let mut out = Vec::new();
    for variant in &resolved.variants {
        let (dir, _) = resolved.variant_target(variant);
        fs::create_dir_all(&dir)?;
        let report = clus_lower_bound(&resolved.instance, &variant.widths)?;
        let path = dir.join("bound_report.json");
        fs::write(&path, serde_json::to_string_pretty(&report)? + "\n")?;
        out.push(BoundOutput { path, report });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariantOutput {
    pub dir: PathBuf,
    pub instance_id: String,
    pub trace_files: Vec<PathBuf>,
    pub summary_file: PathBuf,
    pub pulls_file: PathBuf,
    /// `(policy label, summary)` in config order.
    pub summaries: Vec<(String, MonteCarloSummary)>,
    pub config_drift: bool,
}

/// Runs every policy on every width variant and writes the CSV outputs.
pub fn cmd_simulate(resolved: &ResolvedExperiment) -> Result<Vec<VariantOutput>> {
    let grid = resolved.grid.rounds(resolved.horizon);
    let mut outputs = Vec::new();
    for variant in &resolved.variants {
        let (dir, instance_id) = resolved.variant_target(variant);
        fs::create_dir_all(&dir)?;
        let config_drift = record_config(&dir, resolved)?;
        let mut trace_files = Vec::new();
        let mut summary = Vec::new();
        let mut pulls = Vec::new();
        let mut summaries = Vec::new();
        for policy in &resolved.policies {
            let spec = resolved.policy_spec(policy, &variant.widths);
            let batch = BatchSpec {
                instance: &resolved.instance,
                policy: &spec,
                horizon: resolved.horizon,
                grid: &grid,
                replications: resolved.replications,
                base_seed: resolved.base_seed,
            };
            let traces = sim::run_traces(&batch, Execution::Parallel)?;
            let rows: Vec<TraceRow> = traces
                .iter()
                .enumerate()
                .flat_map(|(rep, t)| {
                    let (label, id) = (&policy.label, &instance_id);
                    t.grid
                        .iter()
                        .zip(&t.pseudo_regret)
                        .map(move |(&n, &r)| TraceRow {
                            policy: label.clone(),
                            instance_id: id.clone(),
                            replication: rep,
                            seed: t.seed,
                            n,
                            pseudo_regret: r,
                        })
                })
                .collect();
            let path = dir.join(format!("traces_{}.csv", file_stem(&policy.label)));
            write_csv(&path, &rows)?;
            trace_files.push(path);

            let s = sim::summarize(&traces)?;
            summary.extend(summary_rows(&policy.label, &instance_id, &s));
            let predicted = sim::predicted_pulls(
                &resolved.instance,
                policy.kind,
                &variant.widths,
                resolved.horizon,
            )?;
            for (flat, id) in resolved.instance.arms().enumerate() {
                pulls.push(PullRow {
                    policy: policy.label.clone(),
                    cluster: id.cluster,
                    arm: id.arm,
                    mean_pulls: s.mean_pulls[flat],
                    predicted_pulls: predicted[flat],
                });
            }
            summaries.push((policy.label.clone(), s));
        }
        let summary_file = dir.join("summary.csv");
        write_csv(&summary_file, &summary)?;
        let pulls_file = dir.join("pulls.csv");
        write_csv(&pulls_file, &pulls)?;
        outputs.push(VariantOutput {
            dir,
            instance_id,
            trace_files,
            summary_file,
            pulls_file,
            summaries,
            config_drift,
        });
    }
    Ok(outputs)
}

/// Reads summary CSVs and writes an SVG regret chart.
pub fn cmd_plot(inputs: &[PathBuf], output: &Path, options: &PlotOptions) -> Result<()> {
    if inputs.is_empty() {
        return Err(Error::InvalidParameter(
            "plot needs at least one summary CSV".into(),
        ));
    }
    let mut series = Vec::new();
    for path in inputs {
        series.extend(read_summary_csv(path)?);
    }
    let svg = render_svg(&series, options)?;
    if let Some(parent) = output.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(output, svg)?;
    Ok(())
}

fn file_stem(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}
