//! Solves the per-cluster exploration program exactly and compares it with
//! the two closed-form candidates.

use clus_ucb::bounds::{cluster_terms, lp, lp_oracle};

fn main() -> clus_ucb::Result<()> {
    let means = [0.41, 0.42, 0.43];
    let mu_star = 0.45;
    for beta in [0.0, 0.01, 0.02, 0.05, 0.2, 1.0] {
        let terms = cluster_terms(0, &means, beta, mu_star)?;
        let sol = lp_oracle(&means, beta, mu_star)?;
        let matrix = lp::constraint_matrix(&means, beta, mu_star);
        let (all, min) = terms.closed_form_points(&means, beta, mu_star);
        println!(
            "beta {beta:<4}  lp {:>9.4}  closed form {:>9.4}  feasible: allarms {} minarm {}",
            sol.optimum,
            terms.lower_term(),
            lp::is_feasible(&matrix, &all, 1e-9),
            min.map_or("n/a".to_string(), |c| lp::is_feasible(&matrix, &c, 1e-9)
                .to_string()),
        );
    }
    Ok(())
}
