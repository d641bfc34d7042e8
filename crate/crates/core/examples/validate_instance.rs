//! Loads an instance from JSON and checks the declared widths.

use clus_ucb::{ClusteredInstance, ValidationMode};

fn main() -> clus_ucb::Result<()> {
    let json = r#"{
        "clusters": [
            {"width": 0.02, "means": [0.40, 0.41, 0.42]},
            {"width": 0.05, "means": [0.60, 0.61, 0.62]}
        ],
        "true_widths_note": "first cluster's spread equals its width"
    }"#;
    let instance: ClusteredInstance = serde_json::from_str(json)?;
    println!(
        "{} clusters, {} arms; note: {:?}",
        instance.num_clusters(),
        instance.num_arms(),
        instance.note()
    );

    let report = instance.validate(ValidationMode::Advisory)?;
    println!(
        "advisory: satisfied={} spreads {:?} per cluster {:?}",
        report.is_satisfied(),
        report.max_spread,
        report.satisfied
    );
    for v in &report.violations {
        println!(
            "  cluster {}: spread {:.3} is not below width {:.3}",
            v.cluster, v.spread, v.width
        );
    }
    match instance.validate(ValidationMode::Strict) {
        Ok(_) => println!("strict: ok"),
        Err(e) => println!("strict: {e}"),
    }

    let (best, mu) = instance.best_arm()?;
    println!(
        "best arm {best} with mean {mu}; gaps {:?}",
        instance.gaps()?
    );
    Ok(())
}
