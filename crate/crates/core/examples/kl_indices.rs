//! How the KL-UCB and Clus-UCB indices tighten as evidence accumulates.
//!
//! Run with `cargo run --example kl_indices`.

use clus_ucb::kl::{self, ArmStats, DEFAULT_TOL};

fn main() {
    println!("d(0.4, 0.6) = {:.6}", kl::kl_bernoulli(0.4, 0.6));
    println!("d+(0.7, 0.6) = {} (q below p)", kl::kl_plus(0.7, 0.6));

    let n = 10_000;
    let budget = kl::exploration_budget(n, 5.0);
    println!("\nbudget at n={n}, a=5: {:.4} nats", budget.nats());
    println!(
        "{:>7} {:>10} {:>22}",
        "pulls", "kl-ucb", "clus-ucb (mate 0.42)"
    );
    for pulls in [5, 20, 100, 500, 2_000] {
        let target = ArmStats::new(0.40, pulls);
        // one cluster mate with a similar mean and the same amount of data
        let mates = [ArmStats::new(0.42, pulls)];
        let plain = kl::kl_ucb_index(target.mean, pulls, budget, DEFAULT_TOL);
        let clustered = kl::clus_ucb_index(target, &mates, 0.02, budget, DEFAULT_TOL);
        println!("{pulls:>7} {plain:>10.5} {clustered:>22.5}");
    }
}
