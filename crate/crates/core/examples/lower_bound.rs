//! Clustered regret constants next to the Lai-Robbins constant.
//!
//! `cargo run --example lower_bound`

use clus_ucb::bounds::{clus_lower_bound, MinArgument};
use clus_ucb::ClusteredInstance;

fn main() -> clus_ucb::Result<()> {
    let cases = [
        (
            "well separated",
            vec![
                (0.02, vec![0.40, 0.41, 0.42]),
                (0.02, vec![0.60, 0.61, 0.62]),
            ],
        ),
        (
            "overlapping",
            vec![
                (0.02, vec![0.80, 0.82, 0.84]),
                (0.02, vec![0.81, 0.83, 0.85]),
            ],
        ),
        (
            "zero width",
            vec![
                (0.0, vec![0.41, 0.42, 0.43]),
                (0.02, vec![0.43, 0.44, 0.45]),
            ],
        ),
    ];
    for (name, parts) in cases {
        let instance = ClusteredInstance::from_parts(parts)?;
        let report = clus_lower_bound(&instance, &instance.widths())?;
        println!(
            "{name}: best arm {} (mu* = {})",
            report.best_arm, report.mu_star
        );
        for t in &report.clusters {
            let which = match t.chosen {
                MinArgument::AllArms => "all arms",
                MinArgument::MinArm => "min arm",
            };
            println!(
                "  cluster {}: allarms {:.4}, minarm {:.4} -> {which}",
                t.cluster, t.term_allarms, t.term_minarm
            );
        }
        println!(
            "  lower {:.4}  upper {:.4}  classical {:.4}\n",
            report.lower, report.upper, report.classical
        );
    }
    Ok(())
}
