use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use clus_ucb::experiment::{self, ExperimentConfig, Overrides, PlotOptions};

#[derive(Parser)]
#[command(
    name = "clus-ucb",
    version,
    about = "Clustered Bernoulli bandits: bounds, simulation, plots"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config's `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fail when a cluster's spread is not below its declared width.
    #[arg(long)]
    strict_validate: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Write bound_report.json for every width variant.
    Bound {
        #[command(flatten)]
        common: Common,
    },
    /// Run the Monte Carlo batches and write trace, summary and pull CSVs.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        horizon: Option<u64>,
    },
    /// Render summary CSVs as an SVG regret chart.
    Plot {
        #[arg(required = true)]
        summaries: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        title: Option<String>,
        /// Overlay `C · log n`.
        #[arg(long, value_name = "C")]
        reference: Option<f64>,
    },
}

fn resolve(
    common: &Common,
    overrides: Overrides,
) -> anyhow::Result<experiment::ResolvedExperiment> {
    let cfg = ExperimentConfig::load(&common.config)
        .with_context(|| format!("reading {}", common.config.display()))?;
    let overrides = Overrides {
        out: common.out.clone(),
        strict: common.strict_validate,
        ..overrides
    };
    Ok(cfg.resolve(&overrides)?)
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Bound { common } => {
            let resolved = resolve(&common, Overrides::default())?;
            for out in experiment::cmd_bound(&resolved)? {
                let r = &out.report;
                println!(
                    "{}: classical {:.4}, lower {:.4}, upper {:.4}",
                    out.path.display(),
                    r.classical,
                    r.lower,
                    r.upper
                );
            }
        }
        Command::Simulate {
            common,
            seed,
            reps,
            horizon,
        } => {
            let overrides = Overrides {
                seed,
                replications: reps,
                horizon,
                ..Default::default()
            };
            let resolved = resolve(&common, overrides)?;
            for v in experiment::cmd_simulate(&resolved)? {
                if v.config_drift {
                    eprintln!(
                        "warning: {} previously held a different configuration",
                        v.dir.display()
                    );
                }
                for (label, s) in &v.summaries {
                    println!(
                        "{} {label}: regret {:.2} ± {:.2}",
                        v.instance_id,
                        s.final_mean(),
                        s.final_stderr()
                    );
                }
                println!("{}", v.summary_file.display());
            }
        }
        Command::Plot {
            summaries,
            out,
            title,
            reference,
        } => {
            let options = PlotOptions {
                title,
                reference_slope: reference,
                ..Default::default()
            };
            experiment::cmd_plot(&summaries, &out, &options)?;
            println!("{}", out.display());
        }
    }
    Ok(())
}
