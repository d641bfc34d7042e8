//! Seeded Bernoulli episodes and Monte Carlo aggregation.
//!
//! Replication `i` of a batch with base seed `s` draws its rewards from a
//! ChaCha8 stream seeded with [`replication_seed`]`(s, i)`:
//!
//! ```text
//! z = s + (i + 1) · 0x9E3779B97F4A7C15          (wrapping)
//! z = (z ^ (z >> 30)) · 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) · 0x94D049BB133111EB
//! seed = z ^ (z >> 31)
//! ```
//!
//! i.e. the SplitMix64 output for counter `i + 1`. For a fixed base seed the
//! map is injective in `i`. Batches are folded in fixed-size chunks of
//! [`CHUNK`] replications merged in index order, so summaries are bitwise
//! identical whatever the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::cluster_terms;
use crate::error::{Error, Result};
use crate::instance::{ArmId, ClusteredInstance};
use crate::kl::kl_bernoulli;
use crate::policy::{Policy, PolicyKind, PolicyParams};

pub const CHUNK: usize = 64;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn replication_seed(base_seed: u64, replication: u64) -> u64 {
    let mut z = base_seed.wrapping_add(replication.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Rounds at which a trace is recorded. The horizon is always included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordingGrid {
    /// About `points` log-spaced rounds between 1 and the horizon.
    Geometric(usize),
    /// Every `k`-th round.
    Every(u64),
    Explicit(Vec<u64>),
}

impl Default for RecordingGrid {
    fn default() -> Self {
        RecordingGrid::Geometric(100)
    }
}

impl RecordingGrid {
    pub fn rounds(&self, horizon: u64) -> Vec<u64> {
        let mut out: Vec<u64> = match self {
            RecordingGrid::Geometric(points) => {
                let points = (*points).max(1);
                let top = (horizon as f64).ln();
                (0..points)
                    .map(|i| {
                        let frac = if points == 1 {
                            1.0
                        } else {
                            i as f64 / (points - 1) as f64
                        };
                        (top * frac).exp().round() as u64
                    })
                    .collect()
            }
            RecordingGrid::Every(k) => {
                let k = (*k).max(1);
                (1..=horizon / k).map(|i| i * k).collect()
            }
            RecordingGrid::Explicit(v) => v.clone(),
        };
        out.push(horizon);
        out.retain(|&n| (1..=horizon).contains(&n));
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// A policy kind with its parameters and a display label.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicySpec {
    pub label: String,
    pub kind: PolicyKind,
    pub params: PolicyParams,
}

impl PolicySpec {
    pub fn new(kind: PolicyKind, params: PolicyParams) -> Self {
        Self {
            label: kind.name().to_owned(),
            kind,
            params,
        }
    }

    /// Default parameters for `kind` with the instance's declared widths.
    pub fn defaults(kind: PolicyKind, instance: &ClusteredInstance) -> Self {
        Self::new(kind, PolicyParams::new(kind, instance.widths()))
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn build(&self, instance: &ClusteredInstance) -> Result<Policy> {
        Policy::new(self.kind, &instance.cluster_sizes(), self.params.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegretTrace {
    pub grid: Vec<u64>,
    pub pseudo_regret: Vec<f64>,
    /// Pull counts at the horizon in flat arm order.
    pub pulls_final: Vec<u64>,
    pub seed: u64,
}

impl RegretTrace {
    pub fn final_regret(&self) -> f64 {
        *self
            .pseudo_regret
            .last()
            .expect("trace records the horizon")
    }
}

fn pseudo_regret(gaps: &[f64], pulls: &[u64]) -> f64 {
    gaps.iter().zip(pulls).map(|(g, &t)| g * t as f64).sum()
}

/// Runs one episode and records `Σ_k Δ_k t_k(n)` at each grid round.
///
/// `grid` must be sorted; rounds past the horizon are ignored and the
/// horizon itself is appended when missing.
pub fn run_episode(
    instance: &ClusteredInstance,
    spec: &PolicySpec,
    horizon: u64,
    seed: u64,
    grid: &[u64],
) -> Result<RegretTrace> {
    let arms = instance.num_arms();
    if horizon < arms as u64 {
        return Err(Error::HorizonTooShort { horizon, arms });
    }
    let gaps = instance.gaps()?;
    let means = instance.flat_means();
    let mut policy = spec.build(instance)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut recorded = Vec::with_capacity(grid.len() + 1);
    let mut regret = Vec::with_capacity(grid.len() + 1);
    let mut next = grid
        .iter()
        .copied()
        .filter(|&g| g >= 1 && g <= horizon)
        .peekable();
    for n in 1..=horizon {
        let arm = policy.select();
        let flat = policy.flat_index(arm);
        let reward = rng.gen_bool(means[flat]);
        policy.observe(arm, reward);
        if next.peek() == Some(&n) || n == horizon {
            while next.peek() == Some(&n) {
                next.next();
            }
            recorded.push(n);
            regret.push(pseudo_regret(&gaps, policy.state().pulls()));
        }
    }
    Ok(RegretTrace {
        grid: recorded,
        pseudo_regret: regret,
        pulls_final: policy.state().pulls().to_vec(),
        seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub grid: Vec<u64>,
    pub mean_regret: Vec<f64>,
    /// Sample standard deviation over `√replications`; 0 for one replication.
    pub stderr: Vec<f64>,
    pub replications: usize,
    /// Mean pull count per arm at the horizon, flat order.
    pub mean_pulls: Vec<f64>,
}

impl MonteCarloSummary {
    pub fn final_mean(&self) -> f64 {
        *self.mean_regret.last().unwrap()
    }

    pub fn final_stderr(&self) -> f64 {
        *self.stderr.last().unwrap()
    }
}

/// Running mean and centred second moment per grid point (Welford / Chan).
#[derive(Debug, Clone)]
struct Accumulator {
    count: usize,
    mean: Vec<f64>,
    m2: Vec<f64>,
    pulls: Vec<f64>,
    grid: Vec<u64>,
}

impl Accumulator {
    fn empty() -> Self {
        Self {
            count: 0,
            mean: Vec::new(),
            m2: Vec::new(),
            pulls: Vec::new(),
            grid: Vec::new(),
        }
    }

    fn push(&mut self, trace: &RegretTrace) {
        if self.count == 0 {
            self.grid = trace.grid.clone();
            self.mean = vec![0.0; trace.grid.len()];
            self.m2 = vec![0.0; trace.grid.len()];
            self.pulls = vec![0.0; trace.pulls_final.len()];
        }
        debug_assert_eq!(self.grid, trace.grid);
        self.count += 1;
        let n = self.count as f64;
        for ((m, s), &x) in self
            .mean
            .iter_mut()
            .zip(&mut self.m2)
            .zip(&trace.pseudo_regret)
        {
            let delta = x - *m;
            *m += delta / n;
            *s += delta * (x - *m);
        }
        for (p, &t) in self.pulls.iter_mut().zip(&trace.pulls_final) {
            *p += t as f64;
        }
    }

    fn merge(mut self, other: Self) -> Self {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        for i in 0..self.mean.len() {
            let delta = other.mean[i] - self.mean[i];
            self.mean[i] += delta * nb / n;
            self.m2[i] += other.m2[i] + delta * delta * na * nb / n;
        }
        for (p, q) in self.pulls.iter_mut().zip(&other.pulls) {
            *p += q;
        }
        self.count += other.count;
        self
    }

    fn finish(self) -> MonteCarloSummary {
        let reps = self.count;
        let stderr = if reps > 1 {
            self.m2
                .iter()
                .map(|s| ((s / (reps - 1) as f64).max(0.0)).sqrt() / (reps as f64).sqrt())
                .collect()
        } else {
            vec![0.0; self.mean.len()]
        };
        MonteCarloSummary {
            grid: self.grid,
            mean_regret: self.mean,
            stderr,
            replications: reps,
            mean_pulls: self.pulls.iter().map(|p| p / reps as f64).collect(),
        }
    }
}

/// Folds traces with the same chunking as [`run_batch`].
pub fn summarize(traces: &[RegretTrace]) -> Result<MonteCarloSummary> {
    if traces.is_empty() {
        return Err(Error::InvalidParameter("no traces to summarize".into()));
    }
    if traces.iter().any(|t| t.grid != traces[0].grid) {
        return Err(Error::InvalidParameter(
            "traces have different recording grids".into(),
        ));
    }
    let acc = traces
        .chunks(CHUNK)
        .map(|chunk| {
            let mut acc = Accumulator::empty();
            chunk.iter().for_each(|t| acc.push(t));
            acc
        })
        .fold(Accumulator::empty(), Accumulator::merge);
    Ok(acc.finish())
}

/// Scheduling of a batch; results do not depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchSpec<'a> {
    pub instance: &'a ClusteredInstance,
    pub policy: &'a PolicySpec,
    pub horizon: u64,
    pub grid: &'a [u64],
    pub replications: usize,
    pub base_seed: u64,
}

fn chunk_ranges(reps: usize) -> Vec<std::ops::Range<usize>> {
    (0..reps)
        .step_by(CHUNK)
        .map(|s| s..(s + CHUNK).min(reps))
        .collect()
}

fn run_chunk(spec: &BatchSpec<'_>, range: std::ops::Range<usize>) -> Result<Accumulator> {
    let mut acc = Accumulator::empty();
    for i in range {
        let seed = replication_seed(spec.base_seed, i as u64);
        acc.push(&run_episode(
            spec.instance,
            spec.policy,
            spec.horizon,
            seed,
            spec.grid,
        )?);
    }
    Ok(acc)
}

/// Runs `replications` independent episodes and aggregates them.
pub fn run_batch(spec: &BatchSpec<'_>, execution: Execution) -> Result<MonteCarloSummary> {
    if spec.replications == 0 {
        return Err(Error::InvalidParameter(
            "replications must be at least 1".into(),
        ));
    }
    let ranges = chunk_ranges(spec.replications);
    let parts: Vec<Accumulator> = match execution {
        Execution::Serial => ranges
            .into_iter()
            .map(|r| run_chunk(spec, r))
            .collect::<Result<_>>()?,
        Execution::Parallel => ranges
            .into_par_iter()
            .map(|r| run_chunk(spec, r))
            .collect::<Result<_>>()?,
    };
    Ok(parts
        .into_iter()
        .fold(Accumulator::empty(), Accumulator::merge)
        .finish())
}

/// Runs the batch keeping every trace, in replication order.
pub fn run_traces(spec: &BatchSpec<'_>, execution: Execution) -> Result<Vec<RegretTrace>> {
    if spec.replications == 0 {
        return Err(Error::InvalidParameter(
            "replications must be at least 1".into(),
        ));
    }
    let one = |i: usize| {
        run_episode(
            spec.instance,
            spec.policy,
            spec.horizon,
            replication_seed(spec.base_seed, i as u64),
            spec.grid,
        )
    };
    match execution {
        Execution::Serial => (0..spec.replications).map(one).collect(),
        Execution::Parallel => (0..spec.replications).into_par_iter().map(one).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArmPullDiagnostic {
    pub arm: ArmId,
    pub mean_pulls: f64,
    /// Mean pulls over `log T`.
    pub empirical_rate: f64,
    /// `1 / (α_k L)`.
    pub predicted_rate: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PullRatioDiagnostic {
    pub cluster: usize,
    pub first: usize,
    pub second: usize,
    /// `t_first / t_second`.
    pub empirical: f64,
    /// `α_second / α_first`.
    pub predicted: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PullCheck {
    pub horizon: u64,
    pub arms: Vec<ArmPullDiagnostic>,
    pub ratios: Vec<PullRatioDiagnostic>,
}

/// Compares mean pull counts of suboptimal-cluster arms with the
/// `log T / (α_k L)` law and their pairwise ratios with `α` inverses.
pub fn expected_pull_check(
    summary: &MonteCarloSummary,
    instance: &ClusteredInstance,
    widths: &[f64],
    horizon: u64,
) -> Result<PullCheck> {
    let (best, mu_star) = instance.best_arm()?;
    if widths.len() != instance.num_clusters() {
        return Err(Error::WidthCount {
            expected: instance.num_clusters(),
            got: widths.len(),
        });
    }
    let log_t = (horizon as f64).ln();
    let mut arms = Vec::new();
    let mut ratios = Vec::new();
    let mut offset = 0;
    for (c, cluster) in instance.clusters().iter().enumerate() {
        let size = cluster.len();
        if c != best.cluster {
            let terms = cluster_terms(c, &cluster.means, widths[c], mu_star)?;
            let (rates, _) = terms.closed_form_points(&cluster.means, widths[c], mu_star);
            let pulls = &summary.mean_pulls[offset..offset + size];
            for k in 0..size {
                let empirical_rate = pulls[k] / log_t;
                arms.push(ArmPullDiagnostic {
                    arm: ArmId::new(c, k),
                    mean_pulls: pulls[k],
                    empirical_rate,
                    predicted_rate: rates[k],
                    relative_error: empirical_rate / rates[k] - 1.0,
                });
            }
            for first in 0..size {
                for second in first + 1..size {
                    let empirical = pulls[first] / pulls[second];
                    let predicted = rates[first] / rates[second];
                    ratios.push(PullRatioDiagnostic {
                        cluster: c,
                        first,
                        second,
                        empirical,
                        predicted,
                        relative_error: empirical / predicted - 1.0,
                    });
                }
            }
        }
        offset += size;
    }
    Ok(PullCheck {
        horizon,
        arms,
        ratios,
    })
}

/// Asymptotic pull count `log T · rate` predicted for each arm under `kind`;
/// `None` for the best arm.
pub fn predicted_pulls(
    instance: &ClusteredInstance,
    kind: PolicyKind,
    widths: &[f64],
    horizon: u64,
) -> Result<Vec<Option<f64>>> {
    let (best, mu_star) = instance.best_arm()?;
    let log_t = (horizon as f64).ln();
    let mut out = Vec::with_capacity(instance.num_arms());
    for (c, cluster) in instance.clusters().iter().enumerate() {
        let clustered = kind == PolicyKind::ClusUcb && c != best.cluster;
        if clustered {
            let terms = cluster_terms(c, &cluster.means, widths[c], mu_star)?;
            let (rates, _) = terms.closed_form_points(&cluster.means, widths[c], mu_star);
            out.extend(rates.into_iter().map(|r| Some(r * log_t)));
        } else {
            for (k, &m) in cluster.means.iter().enumerate() {
                let id = ArmId::new(c, k);
                out.push((id != best).then(|| log_t / kl_bernoulli(m, mu_star)));
            }
        }
    }
    Ok(out)
}
