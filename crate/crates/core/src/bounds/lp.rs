//! Exact solver for the per-cluster lower-bound linear program
//!
//! ```text
//! minimize   Σ_i (μ* − μ_i) c_i
//! subject to c_i d(μ_i, μ*) + Σ_{k≠i} c_k d⁺(μ_k, μ* − β) ≥ 1   for every i
//!            c ≥ 0
//! ```
//!
//! by enumerating every basic point: a support set `P` of nonzero
//! coordinates paired with an equally sized set `R` of tight rows. The
//! objective has positive weights on a pointed feasible region, so the
//! optimum sits at one of these points.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kl::{kl_bernoulli, kl_plus};

/// Largest cluster the enumeration accepts.
pub const MAX_LP_ARMS: usize = 12;

const FEAS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpSolution {
    pub optimum: f64,
    pub c: Vec<f64>,
}

/// Constraint matrix of the cluster program; row `i` is the constraint of arm `i`.
pub fn constraint_matrix(means: &[f64], beta: f64, mu_star: f64) -> Vec<Vec<f64>> {
    let shifted = (mu_star - beta).max(0.0);
    (0..means.len())
        .map(|i| {
            (0..means.len())
                .map(|k| {
                    if k == i {
                        kl_bernoulli(means[k], mu_star)
                    } else {
                        kl_plus(means[k], shifted)
                    }
                })
                .collect()
        })
        .collect()
}

/// Checks `c ≥ 0` and every row `≥ 1` up to a relative slack.
pub fn is_feasible(matrix: &[Vec<f64>], c: &[f64], slack: f64) -> bool {
    c.iter().all(|&x| x >= -slack)
        && matrix
            .iter()
            .all(|row| row.iter().zip(c).map(|(m, x)| m * x).sum::<f64>() >= 1.0 - slack)
}

pub fn lp_oracle(means: &[f64], beta: f64, mu_star: f64) -> Result<LpSolution> {
    let k = means.len();
    if k == 0 {
        return Err(Error::InvalidParameter("empty cluster".into()));
    }
    if k > MAX_LP_ARMS {
        return Err(Error::EnumerationLimit {
            size: k,
            limit: MAX_LP_ARMS,
        });
    }
    if let Some(&m) = means.iter().find(|&&m| !(m < mu_star)) {
        return Err(Error::InvalidParameter(format!(
            "cluster mean {m} is not below μ* = {mu_star}"
        )));
    }
    let matrix = constraint_matrix(means, beta, mu_star);
    if matrix.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(
            "constraint matrix has infinite entries".into(),
        ));
    }
    let cost: Vec<f64> = means.iter().map(|m| mu_star - m).collect();

    let mut by_size: Vec<Vec<u32>> = vec![Vec::new(); k + 1];
    for mask in 1u32..(1 << k) {
        by_size[mask.count_ones() as usize].push(mask);
    }

    let mut best: Option<LpSolution> = None;
    let mut sub = vec![0.0; k * k];
    let mut rhs = vec![0.0; k];
    let mut c = vec![0.0; k];
    for size in 1..=k {
        for &support in &by_size[size] {
            let cols = bits(support);
            for &tight in &by_size[size] {
                let rows = bits(tight);
                for (r, &i) in rows.iter().enumerate() {
                    for (s, &j) in cols.iter().enumerate() {
                        sub[r * size + s] = matrix[i][j];
                    }
                    rhs[r] = 1.0;
                }
                if !solve_in_place(&mut sub[..size * size], &mut rhs[..size], size) {
                    continue;
                }
                c.iter_mut().for_each(|x| *x = 0.0);
                for (s, &j) in cols.iter().enumerate() {
                    c[j] = rhs[s];
                }
                let scale = c.iter().fold(1.0f64, |m, x| m.max(x.abs()));
                if !is_feasible(&matrix, &c, FEAS_TOL * scale) {
                    continue;
                }
                c.iter_mut().for_each(|x| *x = x.max(0.0));
                let objective: f64 = cost.iter().zip(&c).map(|(a, x)| a * x).sum();
                if best.as_ref().is_none_or(|b| objective < b.optimum) {
                    best = Some(LpSolution {
                        optimum: objective,
                        c: c.clone(),
                    });
                }
            }
        }
    }
    // c_i = 1 / d(μ_i, μ*) on every coordinate is always feasible, so a vertex exists
    best.ok_or_else(|| Error::InvalidParameter("no basic feasible point found".into()))
}

fn bits(mask: u32) -> Vec<usize> {
    (0..32).filter(|b| mask & (1 << b) != 0).collect()
}

/// Gaussian elimination with partial pivoting on a row-major `n × n` system.
/// Leaves the solution in `rhs`; returns false when the matrix is singular.
fn solve_in_place(a: &mut [f64], rhs: &mut [f64], n: usize) -> bool {
    let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return false;
    }
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x * n + col].abs().total_cmp(&a[y * n + col].abs()))
            .unwrap();
        if a[pivot * n + col].abs() <= 1e-13 * scale {
            return false;
        }
        if pivot != col {
            for j in 0..n {
                a.swap(pivot * n + j, col * n + j);
            }
            rhs.swap(pivot, col);
        }
        let diag = a[col * n + col];
        for row in col + 1..n {
            let factor = a[row * n + col] / diag;
            if factor != 0.0 {
                for j in col..n {
                    a[row * n + j] -= factor * a[col * n + j];
                }
                rhs[row] -= factor * rhs[col];
            }
        }
    }
    for col in (0..n).rev() {
        let mut acc = rhs[col];
        for j in col + 1..n {
            acc -= a[col * n + j] * rhs[j];
        }
        rhs[col] = acc / a[col * n + col];
    }
    rhs.iter().all(|x| x.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_variable() {
        let sol = lp_oracle(&[0.3], 0.1, 0.7).unwrap();
        let want = 0.4 / kl_bernoulli(0.3, 0.7);
        assert_abs_diff_eq!(sol.optimum, want, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.c[0], 1.0 / kl_bernoulli(0.3, 0.7), epsilon = 1e-9);
    }

    #[test]
    fn unit_width_decouples() {
        let means = [0.2, 0.35, 0.5];
        let sol = lp_oracle(&means, 1.0, 0.6).unwrap();
        let classical: f64 = means
            .iter()
            .map(|m| (0.6 - m) / kl_bernoulli(*m, 0.6))
            .sum();
        assert_abs_diff_eq!(sol.optimum, classical, epsilon = 1e-10);
    }

    #[test]
    fn separated_cluster() {
        // scipy HiGHS on the same program: 2.665145109389183
        let sol = lp_oracle(&[0.40, 0.41, 0.42], 0.02, 0.62).unwrap();
        assert_abs_diff_eq!(sol.optimum, 2.665145109389183, epsilon = 1e-9);
    }

    #[test]
    fn rejects_oversized_and_optimal_clusters() {
        let big = vec![0.1; MAX_LP_ARMS + 1];
        assert!(matches!(
            lp_oracle(&big, 0.1, 0.5),
            Err(Error::EnumerationLimit { .. })
        ));
        assert!(lp_oracle(&[0.5, 0.6], 0.1, 0.6).is_err());
    }

    #[test]
    fn elimination_solves_small_system() {
        let mut a = vec![2.0, 1.0, 1.0, 3.0];
        let mut b = vec![3.0, 5.0];
        assert!(solve_in_place(&mut a, &mut b, 2));
        assert_abs_diff_eq!(b[0], 0.8, epsilon = 1e-14);
        assert_abs_diff_eq!(b[1], 1.4, epsilon = 1e-14);
        let mut singular = vec![1.0, 2.0, 2.0, 4.0];
        assert!(!solve_in_place(&mut singular, &mut [1.0, 1.0], 2));
    }
}
