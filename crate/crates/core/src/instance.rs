//! Clustered Bernoulli instances.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Spreads within this distance of the width count as equal to it.
pub const SPREAD_EPS: f64 = 1e-12;

/// Arm `arm` inside cluster `cluster`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ArmId {
    pub cluster: usize,
    pub arm: usize,
}

impl ArmId {
    pub fn new(cluster: usize, arm: usize) -> Self {
        Self { cluster, arm }
    }
}

impl std::fmt::Display for ArmId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.cluster, self.arm)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    /// Declared bound on the pairwise spread of means.
    pub width: f64,
    pub means: Vec<f64>,
}

impl Cluster {
    pub fn new(width: f64, means: Vec<f64>) -> Self {
        Self { width, means }
    }

    pub fn len(&self) -> usize {
        self.means.len()
    }

    pub fn is_empty(&self) -> bool {
        self.means.is_empty()
    }

    pub fn spread(&self) -> f64 {
        let (lo, hi) = self
            .means
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &m| {
                (lo.min(m), hi.max(m))
            });
        if self.means.is_empty() {
            0.0
        } else {
            hi - lo
        }
    }

    pub fn min_mean(&self) -> f64 {
        self.means.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValidationMode {
    Strict,
    #[default]
    Advisory,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub cluster: usize,
    pub spread: f64,
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub satisfied: Vec<bool>,
    pub max_spread: Vec<f64>,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_satisfied(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Ground-truth arm means partitioned into clusters.
///
/// Widths stored here are the declared ones; an experiment may hand a
/// different width vector to the policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance")]
pub struct ClusteredInstance {
    clusters: Vec<Cluster>,
    #[serde(skip_serializing_if = "Option::is_none")]
    true_widths_note: Option<String>,
}

#[derive(Deserialize)]
struct RawInstance {
    clusters: Vec<Cluster>,
    #[serde(default)]
    true_widths_note: Option<String>,
}

impl TryFrom<RawInstance> for ClusteredInstance {
    type Error = Error;

    fn try_from(raw: RawInstance) -> Result<Self> {
        let mut inst = Self::new(raw.clusters)?;
        inst.true_widths_note = raw.true_widths_note;
        Ok(inst)
    }
}

impl ClusteredInstance {
    pub fn new(clusters: Vec<Cluster>) -> Result<Self> {
        if clusters.is_empty() {
            return Err(Error::NoClusters);
        }
        for (c, cluster) in clusters.iter().enumerate() {
            if cluster.is_empty() {
                return Err(Error::EmptyCluster(c));
            }
            if !(0.0..=1.0).contains(&cluster.width) {
                return Err(Error::WidthOutOfRange {
                    cluster: c,
                    value: cluster.width,
                });
            }
            for (k, &m) in cluster.means.iter().enumerate() {
                if !(0.0..=1.0).contains(&m) {
                    return Err(Error::MeanOutOfRange {
                        cluster: c,
                        arm: k,
                        value: m,
                    });
                }
            }
        }
        Ok(Self {
            clusters,
            true_widths_note: None,
        })
    }

    /// Builds an instance from `(width, means)` pairs.
    pub fn from_parts<I, M>(parts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, M)>,
        M: Into<Vec<f64>>,
    {
        Self::new(
            parts
                .into_iter()
                .map(|(w, m)| Cluster::new(w, m.into()))
                .collect(),
        )
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.true_widths_note = Some(note.into());
        self
    }

    pub fn note(&self) -> Option<&str> {
        self.true_widths_note.as_deref()
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn num_clusters(&self) -> usize {
        self.clusters.len()
    }

    pub fn num_arms(&self) -> usize {
        self.clusters.iter().map(Cluster::len).sum()
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        self.clusters.iter().map(Cluster::len).collect()
    }

    pub fn widths(&self) -> Vec<f64> {
        self.clusters.iter().map(|c| c.width).collect()
    }

    pub fn mean(&self, id: ArmId) -> f64 {
        self.clusters[id.cluster].means[id.arm]
    }

    /// Arms in cluster-major order; the position in this iterator is the flat index.
    pub fn arms(&self) -> impl Iterator<Item = ArmId> + '_ {
        self.clusters
            .iter()
            .enumerate()
            .flat_map(|(c, cl)| (0..cl.len()).map(move |k| ArmId::new(c, k)))
    }

    pub fn flat_means(&self) -> Vec<f64> {
        self.clusters
            .iter()
            .flat_map(|c| c.means.iter().copied())
            .collect()
    }

    /// Same means with a different declared width vector.
    pub fn with_widths(&self, widths: &[f64]) -> Result<Self> {
        if widths.len() != self.clusters.len() {
            return Err(Error::WidthCount {
                expected: self.clusters.len(),
                got: widths.len(),
            });
        }
        let clusters = self
            .clusters
            .iter()
            .zip(widths)
            .map(|(c, &w)| Cluster::new(w, c.means.clone()))
            .collect();
        let mut inst = Self::new(clusters)?;
        inst.true_widths_note = self.true_widths_note.clone();
        Ok(inst)
    }

    /// Checks every cluster's spread against its width.
    ///
    /// Satisfied means `spread < width` (strict), or `spread = width = 0`.
    pub fn validate(&self, mode: ValidationMode) -> Result<ValidationReport> {
        let mut satisfied = Vec::with_capacity(self.clusters.len());
        let mut max_spread = Vec::with_capacity(self.clusters.len());
        let mut violations = Vec::new();
        for (c, cluster) in self.clusters.iter().enumerate() {
            let spread = cluster.spread();
            let ok = spread < cluster.width - SPREAD_EPS
                || (cluster.width == 0.0 && spread <= SPREAD_EPS);
            if !ok {
                violations.push(Violation {
                    cluster: c,
                    spread,
                    width: cluster.width,
                });
            }
            satisfied.push(ok);
            max_spread.push(spread);
        }
        if mode == ValidationMode::Strict && !violations.is_empty() {
            return Err(Error::ConstraintViolation(violations));
        }
        Ok(ValidationReport {
            satisfied,
            max_spread,
            violations,
        })
    }

    /// The unique arm with the largest mean, and that mean.
    pub fn best_arm(&self) -> Result<(ArmId, f64)> {
        let mut best: Option<(ArmId, f64)> = None;
        let mut tied = false;
        for id in self.arms() {
            let m = self.mean(id);
            match best {
                Some((_, b)) if m < b => {}
                Some((_, b)) if m == b => tied = true,
                _ => {
                    best = Some((id, m));
                    tied = false;
                }
            }
        }
        let best = best.ok_or(Error::NoClusters)?;
        if tied {
            return Err(Error::NonUniqueOptimum(best.1));
        }
        Ok(best)
    }

    /// `μ* − μ_k` per arm, in flat order.
    pub fn gaps(&self) -> Result<Vec<f64>> {
        let (_, mu_star) = self.best_arm()?;
        Ok(self.arms().map(|id| mu_star - self.mean(id)).collect())
    }
}
