//! Asymptotic regret constants for clustered instances.
//!
//! For a suboptimal cluster `c` with width `β` and best mean `μ*`:
//!
//! ```text
//! b_k   = d⁺(μ_k, μ* − β)
//! α_k   = d⁺(μ_k, μ*) − b_k
//! L     = 1 + Σ_k b_k / α_k
//! all   = Σ_k (μ* − μ_k) / (α_k L)
//! min   = (μ* − μ_min) / d⁺(μ_min, μ* − β)        (+∞ when the divergence is 0)
//! ```
//!
//! The lower constant takes `min(all, min)` per suboptimal cluster, the
//! Clus-UCB upper constant takes `all`, and the optimal cluster always
//! contributes its classical Lai-Robbins sum.

pub mod lp;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::instance::{ArmId, ClusteredInstance};
use crate::kl::{kl_bernoulli, kl_plus};

pub use lp::{lp_oracle, LpSolution, MAX_LP_ARMS};

/// Which argument of the per-cluster minimum is smaller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MinArgument {
    #[serde(rename = "ALLARMS")]
    AllArms,
    #[serde(rename = "MINARM")]
    MinArm,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterBoundTerms {
    pub cluster: usize,
    pub alpha: Vec<f64>,
    pub b: Vec<f64>,
    #[serde(rename = "L", serialize_with = "extended")]
    pub l: f64,
    pub mu_min: f64,
    pub term_allarms: f64,
    #[serde(serialize_with = "extended")]
    pub term_minarm: f64,
    pub chosen: MinArgument,
}

impl ClusterBoundTerms {
    pub fn lower_term(&self) -> f64 {
        self.term_allarms.min(self.term_minarm)
    }

    /// The closed-form points of the cluster program: `c_k = 1/(α_k L)` and
    /// `c = e_min / d⁺(μ_min, μ* − β)` (absent when that divergence is 0).
    pub fn closed_form_points(
        &self,
        means: &[f64],
        beta: f64,
        mu_star: f64,
    ) -> (Vec<f64>, Option<Vec<f64>>) {
        let all = if self.l.is_finite() {
            self.alpha.iter().map(|a| 1.0 / (a * self.l)).collect()
        } else {
            // zero-width limit: weights proportional to 1 / gap, normalised by Σ b_j / gap_j
            let norm: f64 = means
                .iter()
                .zip(&self.b)
                .map(|(m, b)| b / (mu_star - m))
                .sum();
            means.iter().map(|m| 1.0 / ((mu_star - m) * norm)).collect()
        };
        let min_pos = argmin(means);
        let denom = kl_plus(means[min_pos], (mu_star - beta).max(0.0));
        let min = (denom > 0.0).then(|| {
            let mut c = vec![0.0; means.len()];
            c[min_pos] = 1.0 / denom;
            c
        });
        (all, min)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpCheck {
    pub cluster: usize,
    pub optimum: Option<f64>,
    pub c: Vec<f64>,
    pub closed_form_min: f64,
    /// `closed_form_min − optimum`; positive values beyond 1e-6 are findings.
    pub gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub mu_star: f64,
    pub best_arm: ArmId,
    pub widths: Vec<f64>,
    pub clusters: Vec<ClusterBoundTerms>,
    pub optimal_cluster: usize,
    pub optimal_cluster_term: f64,
    pub lower: f64,
    pub upper: f64,
    pub classical: f64,
    pub lp_values: Vec<LpCheck>,
}

fn extended<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

/// Lai-Robbins constant `Σ_{μ_k < μ*} (μ* − μ_k) / d(μ_k, μ*)`.
pub fn classical_bound(instance: &ClusteredInstance) -> Result<f64> {
    let (_, mu_star) = instance.best_arm()?;
    Ok(classical_sum(&instance.flat_means(), mu_star))
}

fn classical_sum(means: &[f64], mu_star: f64) -> f64 {
    means
        .iter()
        .filter(|&&m| m < mu_star)
        .map(|&m| (mu_star - m) / kl_bernoulli(m, mu_star))
        .sum()
}

/// Closed-form terms of one suboptimal cluster.
pub fn cluster_terms(
    cluster: usize,
    means: &[f64],
    beta: f64,
    mu_star: f64,
) -> Result<ClusterBoundTerms> {
    let shifted = (mu_star - beta).max(0.0);
    let mu_min = means.iter().copied().fold(f64::INFINITY, f64::min);
    let min_denom = kl_plus(mu_min, shifted);
    let term_minarm = if min_denom > 0.0 {
        (mu_star - mu_min) / min_denom
    } else {
        f64::INFINITY
    };
    let b: Vec<f64> = means.iter().map(|&m| kl_plus(m, shifted)).collect();

    let (alpha, l, term_allarms) = if beta == 0.0 {
        // α ≡ 0 at zero width; take the β → 0⁺ limit, where α_k / α_j → gap_k / gap_j
        let norm: f64 = means.iter().zip(&b).map(|(m, b)| b / (mu_star - m)).sum();
        (
            vec![0.0; means.len()],
            f64::INFINITY,
            means.len() as f64 / norm,
        )
    } else {
        let alpha: Vec<f64> = means
            .iter()
            .zip(&b)
            .map(|(&m, b)| kl_plus(m, mu_star) - b)
            .collect();
        if alpha.iter().any(|a| !(*a > 0.0)) {
            return Err(Error::DegenerateDivergence {
                cluster,
                what: "alpha is not positive",
            });
        }
        let l = 1.0 + b.iter().zip(&alpha).map(|(b, a)| b / a).sum::<f64>();
        let all = means
            .iter()
            .zip(&alpha)
            .map(|(m, a)| (mu_star - m) / (a * l))
            .sum();
        (alpha, l, all)
    };
    if term_allarms.is_nan() || term_minarm.is_nan() {
        return Err(Error::DegenerateDivergence {
            cluster,
            what: "undefined cluster term",
        });
    }
    let chosen = if term_allarms <= term_minarm {
        MinArgument::AllArms
    } else {
        MinArgument::MinArm
    };
    Ok(ClusterBoundTerms {
        cluster,
        alpha,
        b,
        l,
        mu_min,
        term_allarms,
        term_minarm,
        chosen,
    })
}

/// Lower constant with per-cluster terms, plus the upper and classical
/// constants and an LP cross-check of every suboptimal cluster.
pub fn clus_lower_bound(instance: &ClusteredInstance, widths: &[f64]) -> Result<BoundReport> {
    if widths.len() != instance.num_clusters() {
        return Err(Error::WidthCount {
            expected: instance.num_clusters(),
            got: widths.len(),
        });
    }
    if let Some(c) = widths.iter().position(|w| !(0.0..=1.0).contains(w)) {
        return Err(Error::WidthOutOfRange {
            cluster: c,
            value: widths[c],
        });
    }
    let (best_arm, mu_star) = instance.best_arm()?;
    let mut clusters = Vec::new();
    let mut lp_values = Vec::new();
    let mut optimal_cluster_term = 0.0;
    for (c, cluster) in instance.clusters().iter().enumerate() {
        if c == best_arm.cluster {
            optimal_cluster_term = classical_sum(&cluster.means, mu_star);
            continue;
        }
        let terms = cluster_terms(c, &cluster.means, widths[c], mu_star)?;
        lp_values.push(lp_check(&terms, &cluster.means, widths[c], mu_star));
        clusters.push(terms);
    }
    let lower = optimal_cluster_term
        + clusters
            .iter()
            .map(ClusterBoundTerms::lower_term)
            .sum::<f64>();
    let upper = optimal_cluster_term + clusters.iter().map(|t| t.term_allarms).sum::<f64>();
    Ok(BoundReport {
        mu_star,
        best_arm,
        widths: widths.to_vec(),
        clusters,
        optimal_cluster: best_arm.cluster,
        optimal_cluster_term,
        lower,
        upper,
        classical: classical_sum(&instance.flat_means(), mu_star),
        lp_values,
    })
}

/// Clus-UCB's asymptotic upper constant (no minimum over arguments).
pub fn clus_upper_constant(instance: &ClusteredInstance, widths: &[f64]) -> Result<f64> {
    Ok(clus_lower_bound(instance, widths)?.upper)
}

fn lp_check(terms: &ClusterBoundTerms, means: &[f64], beta: f64, mu_star: f64) -> LpCheck {
    let closed_form_min = terms.lower_term();
    match lp_oracle(means, beta, mu_star) {
        Ok(sol) => LpCheck {
            cluster: terms.cluster,
            optimum: Some(sol.optimum),
            gap: Some(closed_form_min - sol.optimum),
            c: sol.c,
            closed_form_min,
            skipped: None,
        },
        Err(e) => LpCheck {
            cluster: terms.cluster,
            optimum: None,
            c: Vec::new(),
            closed_form_min,
            gap: None,
            skipped: Some(e.to_string()),
        },
    }
}
