//! Simulate, write a summary CSV, read it back and render an SVG chart with
//! the clustered lower constant as a reference slope.
//!
//! `cargo run --release --example plot_summary -- [out_dir]`

use std::path::PathBuf;

use clus_ucb::bounds::clus_lower_bound;
use clus_ucb::experiment::{cmd_plot, summary_rows, PlotOptions, SummaryRow};
use clus_ucb::sim::{run_batch, BatchSpec, Execution};
use clus_ucb::{ClusteredInstance, PolicyKind, PolicySpec, RecordingGrid};

fn main() -> anyhow::Result<()> {
    let out = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "out/plot_summary".into()),
    );
    std::fs::create_dir_all(&out)?;
    let instance = ClusteredInstance::from_parts([
        (0.02, vec![0.40, 0.41, 0.42]),
        (0.02, vec![0.60, 0.61, 0.62]),
    ])?;
    let horizon = 50_000;
    let grid = RecordingGrid::default().rounds(horizon);

    let mut rows: Vec<SummaryRow> = Vec::new();
    for kind in [PolicyKind::KlUcb, PolicyKind::ClusUcb] {
        let mut spec = PolicySpec::defaults(kind, &instance);
        spec.params = spec.params.update_interval(50);
        let batch = BatchSpec {
            instance: &instance,
            policy: &spec,
            horizon,
            grid: &grid,
            replications: 12,
            base_seed: 5,
        };
        rows.extend(summary_rows(
            kind.name(),
            "example",
            &run_batch(&batch, Execution::Parallel)?,
        ));
    }
    let csv_path = out.join("summary.csv");
    let mut w = csv::Writer::from_path(&csv_path)?;
    for row in &rows {
        w.serialize(row)?;
    }
    w.flush()?;

    let bound = clus_lower_bound(&instance, &instance.widths())?;
    let options = PlotOptions {
        title: Some("Two well separated clusters".into()),
        reference_slope: Some(bound.lower),
        ..Default::default()
    };
    let svg_path = out.join("regret.svg");
    cmd_plot(std::slice::from_ref(&csv_path), &svg_path, &options)?;
    println!("{}\n{}", csv_path.display(), svg_path.display());
    Ok(())
}
