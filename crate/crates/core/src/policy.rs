//! Index policies for clustered Bernoulli bandits.
//!
//! All policies share one driver: pull every arm once in flat order, then
//! pick the argmax of a cached index table that is rebuilt on the first
//! post-initialization round and on every round divisible by
//! `update_interval`. Ties go to the lowest [`ArmId`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::ArmId;
use crate::kl::{self, ArmStats, DEFAULT_TOL};

/// Cluster reward estimate used by the two-level policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TlpVariant {
    /// Pooled successes over pooled pulls.
    Mean,
    /// Largest empirical mean among the cluster's arms.
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum PolicyKind {
    KlUcb,
    ClusUcb,
    Tlp(TlpVariant),
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 4] = [
        PolicyKind::KlUcb,
        PolicyKind::ClusUcb,
        PolicyKind::Tlp(TlpVariant::Mean),
        PolicyKind::Tlp(TlpVariant::Max),
    ];

    /// Exploration constant used when none is given.
    pub fn default_a(self) -> f64 {
        match self {
            PolicyKind::ClusUcb => 5.0,
            PolicyKind::KlUcb | PolicyKind::Tlp(_) => 4.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::KlUcb => "kl-ucb",
            PolicyKind::ClusUcb => "clus-ucb",
            PolicyKind::Tlp(TlpVariant::Mean) => "tlp-mean",
            PolicyKind::Tlp(TlpVariant::Max) => "tlp-max",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .to_ascii_lowercase()
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect();
        match norm.as_str() {
            "klucb" => Ok(PolicyKind::KlUcb),
            "clusucb" => Ok(PolicyKind::ClusUcb),
            "tlpmean" => Ok(PolicyKind::Tlp(TlpVariant::Mean)),
            "tlpmax" => Ok(PolicyKind::Tlp(TlpVariant::Max)),
            _ => Err(Error::InvalidParameter(format!("unknown policy `{s}`"))),
        }
    }
}

impl TryFrom<String> for PolicyKind {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PolicyKind> for String {
    fn from(k: PolicyKind) -> Self {
        k.name().to_owned()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyParams {
    pub a: f64,
    /// One width per cluster; only Clus-UCB reads them.
    pub declared_widths: Vec<f64>,
    pub update_interval: u64,
    pub tol: f64,
}

impl PolicyParams {
    pub fn new(kind: PolicyKind, declared_widths: Vec<f64>) -> Self {
        Self {
            a: kind.default_a(),
            declared_widths,
            update_interval: 1,
            tol: DEFAULT_TOL,
        }
    }

    pub fn a(mut self, a: f64) -> Self {
        self.a = a;
        self
    }

    pub fn update_interval(mut self, every: u64) -> Self {
        self.update_interval = every;
        self
    }

    pub fn tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

/// Per-arm counters and cached indices, all in flat arm order.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyState {
    pulls: Vec<u64>,
    successes: Vec<u64>,
    index: Vec<f64>,
    cluster_index: Vec<f64>,
    /// Round that the next `select` serves (1-based).
    round: u64,
    indexed: bool,
}

impl PolicyState {
    pub fn pulls(&self) -> &[u64] {
        &self.pulls
    }

    pub fn successes(&self) -> &[u64] {
        &self.successes
    }

    /// Cached arm indices; `NaN` before the first computation.
    pub fn indices(&self) -> &[f64] {
        &self.index
    }

    /// Cached cluster-level indices (two-level policy only).
    pub fn cluster_indices(&self) -> &[f64] {
        &self.cluster_index
    }

    /// The round about to be played, starting at 1.
    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn empirical_mean(&self, flat: usize) -> f64 {
        let t = self.pulls[flat];
        if t == 0 {
            0.0
        } else {
            self.successes[flat] as f64 / t as f64
        }
    }
}

/// A sequential arm-selection rule together with its running state.
#[derive(Debug, Clone)]
pub struct Policy {
    kind: PolicyKind,
    params: PolicyParams,
    offsets: Vec<usize>,
    state: PolicyState,
    scratch: Vec<ArmStats>,
}

impl Policy {
    pub fn new(kind: PolicyKind, cluster_sizes: &[usize], params: PolicyParams) -> Result<Self> {
        let arms: usize = cluster_sizes.iter().sum();
        if arms == 0 {
            return Err(Error::InvalidParameter(
                "policy needs at least one arm".into(),
            ));
        }
        if let Some(c) = cluster_sizes.iter().position(|&s| s == 0) {
            return Err(Error::EmptyCluster(c));
        }
        if params.update_interval == 0 {
            return Err(Error::InvalidParameter(
                "update_interval must be at least 1".into(),
            ));
        }
        if !(params.tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tol must be positive, got {}",
                params.tol
            )));
        }
        if !(params.a >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "a must be nonnegative, got {}",
                params.a
            )));
        }
        if kind == PolicyKind::ClusUcb {
            if params.declared_widths.len() != cluster_sizes.len() {
                return Err(Error::WidthCount {
                    expected: cluster_sizes.len(),
                    got: params.declared_widths.len(),
                });
            }
            if let Some(c) = params
                .declared_widths
                .iter()
                .position(|w| !(0.0..=1.0).contains(w))
            {
                return Err(Error::WidthOutOfRange {
                    cluster: c,
                    value: params.declared_widths[c],
                });
            }
        }
        let mut offsets = Vec::with_capacity(cluster_sizes.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for &s in cluster_sizes {
            acc += s;
            offsets.push(acc);
        }
        Ok(Self {
            kind,
            params,
            offsets,
            state: PolicyState {
                pulls: vec![0; arms],
                successes: vec![0; arms],
                index: vec![f64::NAN; arms],
                cluster_index: vec![f64::NAN; cluster_sizes.len()],
                round: 1,
                indexed: false,
            },
            scratch: Vec::new(),
        })
    }

    pub fn kind(&self) -> PolicyKind {
        self.kind
    }

    pub fn params(&self) -> &PolicyParams {
        &self.params
    }

    pub fn state(&self) -> &PolicyState {
        &self.state
    }

    pub fn num_arms(&self) -> usize {
        self.state.pulls.len()
    }

    pub fn num_clusters(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn flat_index(&self, id: ArmId) -> usize {
        self.offsets[id.cluster] + id.arm
    }

    pub fn arm_id(&self, flat: usize) -> ArmId {
        let cluster = self.offsets.partition_point(|&o| o <= flat) - 1;
        ArmId::new(cluster, flat - self.offsets[cluster])
    }

    /// Arm to pull in the current round.
    pub fn select(&mut self) -> ArmId {
        let n = self.state.round;
        let k = self.num_arms() as u64;
        if n <= k {
            return self.arm_id((n - 1) as usize);
        }
        if !self.state.indexed || n.is_multiple_of(self.params.update_interval) {
            self.recompute(n);
            self.state.indexed = true;
        }
        let flat = match self.kind {
            PolicyKind::KlUcb | PolicyKind::ClusUcb => argmax(&self.state.index),
            PolicyKind::Tlp(_) => {
                let c = argmax(&self.state.cluster_index);
                let range = self.offsets[c]..self.offsets[c + 1];
                self.offsets[c] + argmax(&self.state.index[range])
            }
        };
        self.arm_id(flat)
    }

    /// Records the reward of `arm` and advances the round.
    pub fn observe(&mut self, arm: ArmId, reward: bool) {
        let flat = self.flat_index(arm);
        self.state.pulls[flat] += 1;
        self.state.successes[flat] += u64::from(reward);
        self.state.round += 1;
    }

    /// Rebuilds every cached index from the statistics after `n - 1` rounds.
    fn recompute(&mut self, n: u64) {
        let budget = kl::exploration_budget(n, self.params.a);
        let tol = self.params.tol;
        match self.kind {
            PolicyKind::KlUcb => self.refresh_kl_ucb(budget, tol),
            PolicyKind::ClusUcb => {
                for c in 0..self.num_clusters() {
                    let beta = self.params.declared_widths[c];
                    let range = self.offsets[c]..self.offsets[c + 1];
                    for target in range.clone() {
                        self.scratch.clear();
                        for mate in range.clone().filter(|&j| j != target) {
                            self.scratch.push(ArmStats::new(
                                self.state.empirical_mean(mate),
                                self.state.pulls[mate],
                            ));
                        }
                        let stats = ArmStats::new(
                            self.state.empirical_mean(target),
                            self.state.pulls[target],
                        );
                        self.state.index[target] =
                            kl::clus_ucb_index(stats, &self.scratch, beta, budget, tol);
                    }
                }
            }
            PolicyKind::Tlp(variant) => {
                self.refresh_kl_ucb(budget, tol);
                for c in 0..self.num_clusters() {
                    let range = self.offsets[c]..self.offsets[c + 1];
                    let pulls: u64 = self.state.pulls[range.clone()].iter().sum();
                    let estimate = match variant {
                        TlpVariant::Mean => {
                            let succ: u64 = self.state.successes[range.clone()].iter().sum();
                            succ as f64 / pulls as f64
                        }
                        TlpVariant::Max => range
                            .map(|j| self.state.empirical_mean(j))
                            .fold(f64::NEG_INFINITY, f64::max),
                    };
                    self.state.cluster_index[c] = kl::kl_ucb_index(estimate, pulls, budget, tol);
                }
            }
        }
    }

    fn refresh_kl_ucb(&mut self, budget: kl::ExplorationBudget, tol: f64) {
        for j in 0..self.num_arms() {
            self.state.index[j] = kl::kl_ucb_index(
                self.state.empirical_mean(j),
                self.state.pulls[j],
                budget,
                tol,
            );
        }
    }
}

/// First position of the maximum; `NaN` entries never win.
fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for (i, &v) in values.iter().enumerate() {
        if v > best_value {
            best = i;
            best_value = v;
        }
    }
    best
}
