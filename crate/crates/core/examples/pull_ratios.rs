//! Suboptimal-cluster pull counts against `log T / (α_k L)`.
//!
//! At moderate horizons the `a log log T` part of the budget is comparable
//! to `log T`, so rates come out high while the ratios settle much sooner.

use clus_ucb::sim::{expected_pull_check, run_batch, BatchSpec, Execution};
use clus_ucb::{ClusteredInstance, PolicyKind, PolicySpec};

fn main() -> clus_ucb::Result<()> {
    let instance = ClusteredInstance::from_parts([
        (0.02, vec![0.40, 0.41, 0.42]),
        (0.02, vec![0.60, 0.61, 0.62]),
    ])?;
    let horizon = 200_000;
    let mut spec = PolicySpec::defaults(PolicyKind::ClusUcb, &instance);
    spec.params = spec.params.update_interval(50);
    let batch = BatchSpec {
        instance: &instance,
        policy: &spec,
        horizon,
        grid: &[horizon],
        replications: 16,
        base_seed: 11,
    };
    let summary = run_batch(&batch, Execution::Parallel)?;
    let check = expected_pull_check(&summary, &instance, &instance.widths(), horizon)?;
    for a in &check.arms {
        println!(
            "arm {}: pulls {:7.1}  rate {:.3} vs {:.3} ({:+.0}%)",
            a.arm,
            a.mean_pulls,
            a.empirical_rate,
            a.predicted_rate,
            100.0 * a.relative_error
        );
    }
    for r in &check.ratios {
        println!(
            "t{}/t{} in cluster {}: {:.3} vs {:.3} ({:+.0}%)",
            r.first,
            r.second,
            r.cluster,
            r.empirical,
            r.predicted,
            100.0 * r.relative_error
        );
    }
    Ok(())
}
