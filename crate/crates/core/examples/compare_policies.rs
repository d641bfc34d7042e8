//! All four policies on an instance where pooling a cluster's rewards
//! misleads the two-level policy.
//!
//! `cargo run --release --example compare_policies`

use clus_ucb::sim::{run_batch, BatchSpec, Execution};
use clus_ucb::{ClusteredInstance, PolicyKind, PolicySpec, RecordingGrid};

fn main() -> clus_ucb::Result<()> {
    let instance = ClusteredInstance::from_parts([
        (0.02, vec![0.68, 0.69, 0.67]),
        (0.8, vec![0.1, 0.2, 0.7]),
    ])?;
    let horizon = 20_000;
    let grid = RecordingGrid::Geometric(20).rounds(horizon);

    for kind in PolicyKind::ALL {
        let mut spec = PolicySpec::defaults(kind, &instance);
        spec.params = spec.params.update_interval(50).tol(1e-4);
        let batch = BatchSpec {
            instance: &instance,
            policy: &spec,
            horizon,
            grid: &grid,
            replications: 16,
            base_seed: 1,
        };
        let summary = run_batch(&batch, Execution::Parallel)?;
        println!(
            "{:<9} regret at {horizon}: {:8.1} ± {:.1}",
            kind.name(),
            summary.final_mean(),
            summary.final_stderr()
        );
    }
    Ok(())
}
