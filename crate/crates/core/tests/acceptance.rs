//! Acceptance suite. Each test writes one `PASS`/`FAIL` line straight to
//! stderr so the verdicts show up in a plain `cargo test` run.
//!
//! The pull-count law needs a 10^6 horizon and is `#[ignore]`d; run it with
//! `cargo test --release --test acceptance -- --ignored`.

use std::fmt::Display;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use clus_ucb::bounds::{classical_bound, clus_lower_bound, cluster_terms, lp, lp_oracle};
use clus_ucb::experiment::{ExperimentConfig, Overrides, ResolvedExperiment};
use clus_ucb::kl::{self, ArmStats, ExplorationBudget};
use clus_ucb::sim::{expected_pull_check, run_batch, run_traces, BatchSpec, Execution};
use clus_ucb::{ClusteredInstance, Error, MonteCarloSummary, Policy, PolicyKind, PolicySpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const INDEX_TOL: f64 = 1e-6;
const DIVERGENCE_TOL: f64 = 1e-10;
const ORACLE_TOL: f64 = 1e-12;
const BOUND_ORDER_TOL: f64 = 1e-12;
const REDUCTION_TOL: f64 = 1e-9;
const LP_TOL: f64 = 1e-9;
const LP_FINDING_TOL: f64 = 1e-6;
const SE_MARGIN: f64 = 2.0;
const DESK_HORIZON: u64 = 100_000;
const DESK_REPS: usize = 24;
const RATE_TOL: f64 = 0.35;
const RATIO_TOL: f64 = 0.30;
const EXACT_SE: f64 = 3.0;

fn report(criterion: &str, pass: bool, detail: impl Display) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(
        std::io::stderr().lock(),
        "acceptance {criterion}: {verdict} | {detail}"
    );
}

// ---------------------------------------------------------------------------
// Test-side reference math, written independently of the library.

fn xlogx_ratio(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * (x / y).ln()
    }
}

fn ref_kl(p: f64, q: f64) -> f64 {
    xlogx_ratio(p, q) + xlogx_ratio(1.0 - p, 1.0 - q)
}

fn ref_kl_plus(p: f64, q: f64) -> f64 {
    if q > p {
        ref_kl(p, q)
    } else {
        0.0
    }
}

fn ref_budget(n: u64, a: f64) -> f64 {
    let l = (n as f64).ln();
    l + a * l.max(1.0).ln()
}

/// Illinois regula falsi on a nondecreasing `g` with `g(lo) ≤ 0 < g(hi)`,
/// finished by bisection so the bracket is below `ORACLE_TOL`.
fn illinois(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let (mut glo, mut ghi) = (g(lo), g(hi));
    let mut side = 0i8;
    for _ in 0..200 {
        if hi - lo < ORACLE_TOL {
            break;
        }
        let mut c = (lo * ghi - hi * glo) / (ghi - glo);
        if !(c > lo && c < hi) {
            c = 0.5 * (lo + hi);
        }
        let gc = g(c);
        if gc <= 0.0 {
            lo = c;
            glo = gc;
            if side == -1 {
                ghi *= 0.5;
            }
            side = -1;
        } else {
            hi = c;
            ghi = gc;
            if side == 1 {
                glo *= 0.5;
            }
            side = 1;
        }
    }
    while hi - lo >= ORACLE_TOL {
        let mid = 0.5 * (lo + hi);
        if g(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Largest `q ∈ [p̂, 1]` with `lhs(q) ≤ budget`, same conventions as the
/// index definition: `p̂` when nothing above it qualifies.
fn ref_invert(p_hat: f64, budget: f64, lhs: impl Fn(f64) -> f64) -> f64 {
    if budget <= 0.0 || lhs(p_hat) > budget {
        return p_hat;
    }
    let top = 1.0 - 1e-15;
    if p_hat >= top || lhs(top) <= budget {
        return 1.0;
    }
    illinois(|q| lhs(q) - budget, p_hat, top)
}

fn ref_kl_ucb(p_hat: f64, pulls: u64, budget: f64) -> f64 {
    ref_invert(p_hat, budget, |q| pulls as f64 * ref_kl(p_hat, q))
}

fn ref_clus_ucb(target: (f64, u64), mates: &[(f64, u64)], beta: f64, budget: f64) -> f64 {
    ref_invert(target.0, budget, |q| {
        target.1 as f64 * ref_kl(target.0, q)
            + mates
                .iter()
                .filter(|m| m.1 > 0)
                .map(|&(m, t)| t as f64 * ref_kl_plus(m, q - beta))
                .sum::<f64>()
    })
}

fn random_mean(rng: &mut ChaCha8Rng) -> f64 {
    match rng.gen_range(0..20) {
        0 => 0.0,
        1 => 1.0,
        _ => rng.gen_range(0.0..1.0),
    }
}

#[test]
fn criterion_1_kl_math_matches_reference() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC1);
    let cases = 1000;
    let (mut div_err, mut idx_err, mut budget_err) = (0.0f64, 0.0f64, 0.0f64);

    for _ in 0..cases {
        let p = random_mean(&mut rng);
        let q = rng.gen_range(1e-3..1.0 - 1e-3);
        let scale = ref_kl(p, q).max(1.0);
        div_err = div_err.max((kl::kl_bernoulli(p, q) - ref_kl(p, q)).abs() / scale);
        let shifted = q - rng.gen_range(0.0..0.3);
        div_err = div_err.max((kl::kl_plus(p, shifted) - ref_kl_plus(p, shifted)).abs() / scale);

        let n = rng.gen_range(2..1_000_000u64);
        let a = [0.0, 3.0, 4.0, 5.0][rng.gen_range(0..4)];
        let budget = ref_budget(n, a);
        budget_err = budget_err.max((kl::exploration_budget(n, a).nats() - budget).abs());
        let nats = ExplorationBudget::from_nats(budget);

        let pulls = rng.gen_range(1..5_000u64);
        let got = kl::kl_ucb_index(p, pulls, nats, kl::DEFAULT_TOL);
        idx_err = idx_err.max((got - ref_kl_ucb(p, pulls, budget)).abs());

        let beta = rng.gen_range(0.0..0.3);
        let target = (p, pulls);
        let mates: Vec<(f64, u64)> = (0..rng.gen_range(0..5))
            .map(|_| {
                let m = (p + rng.gen_range(-beta..=beta)).clamp(0.0, 1.0);
                (m, rng.gen_range(0..5_000u64))
            })
            .collect();
        let stats: Vec<ArmStats> = mates.iter().map(|&(m, t)| ArmStats::new(m, t)).collect();
        let got = kl::clus_ucb_index(ArmStats::new(p, pulls), &stats, beta, nats, kl::DEFAULT_TOL);
        idx_err = idx_err.max((got - ref_clus_ucb(target, &mates, beta, budget)).abs());
    }
    let elapsed = started.elapsed().as_secs_f64();
    let pass = div_err <= DIVERGENCE_TOL
        && budget_err <= DIVERGENCE_TOL
        && idx_err <= INDEX_TOL
        && elapsed < 10.0;
    report(
        "1 (KL math oracle)",
        pass,
        format!(
            "{cases}×4 cases; max divergence err {div_err:.1e} (tol {DIVERGENCE_TOL:.0e}), \
             budget err {budget_err:.1e}, index err {idx_err:.1e} (tol {INDEX_TOL:.0e}), {elapsed:.2}s"
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------------

/// Random instance with at most 3 clusters of at most 5 arms; each cluster's
/// spread is strictly inside its width. Returns the instance and its widths.
fn random_instance(rng: &mut ChaCha8Rng) -> (ClusteredInstance, Vec<f64>) {
    loop {
        let m = rng.gen_range(1..=3);
        let parts: Vec<(f64, Vec<f64>)> = (0..m)
            .map(|_| {
                let width: f64 = rng.gen_range(0.01..0.5);
                let centre: f64 = rng.gen_range(0.05..0.95);
                let k = rng.gen_range(1..=5);
                let means = (0..k)
                    .map(|_| (centre + rng.gen_range(-0.45..0.45) * width).clamp(0.01, 0.99))
                    .collect();
                (width, means)
            })
            .collect();
        let instance = ClusteredInstance::from_parts(parts).unwrap();
        if instance.best_arm().is_ok() {
            let widths = instance.widths();
            return (instance, widths);
        }
    }
}

fn random_instances() -> Vec<(ClusteredInstance, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC2);
    (0..200).map(|_| random_instance(&mut rng)).collect()
}

#[test]
fn criterion_2_bound_consistency() {
    let instances = random_instances();
    let mut worst_order = f64::NEG_INFINITY;
    let mut worst_unit = 0.0f64;
    for (instance, widths) in &instances {
        let r = clus_lower_bound(instance, widths).unwrap();
        worst_order = worst_order
            .max(r.lower - r.upper)
            .max(r.lower - r.classical - BOUND_ORDER_TOL * r.classical.max(1.0));
        let unit = clus_lower_bound(instance, &vec![1.0; instance.num_clusters()]).unwrap();
        let classical = classical_bound(instance).unwrap();
        worst_unit = worst_unit
            .max((unit.lower - classical).abs())
            .max((unit.upper - classical).abs());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0xC20);
    let mut worst_zero = 0.0f64;
    for _ in 0..200 {
        let mu_star = rng.gen_range(0.1..0.99);
        let mu = rng.gen_range(0.01..mu_star - 0.005);
        let k = rng.gen_range(1..=5);
        let terms = cluster_terms(0, &vec![mu; k], 0.0, mu_star).unwrap();
        let single = (mu_star - mu) / ref_kl(mu, mu_star);
        worst_zero = worst_zero.max((terms.lower_term() - single).abs());
    }

    let pass = worst_order <= BOUND_ORDER_TOL
        && worst_unit <= REDUCTION_TOL
        && worst_zero <= REDUCTION_TOL;
    report(
        "2 (bound consistency)",
        pass,
        format!(
            "200 instances; max(lower−min(upper, classical)) {worst_order:.1e}; \
             β=1 reduction err {worst_unit:.1e}; β=0 equal-mean err {worst_zero:.1e} (tol {REDUCTION_TOL:.0e})"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_3_lp_oracle_agrees_with_closed_form() {
    let started = Instant::now();
    let mut programs = 0;
    let mut infeasible = Vec::new();
    let mut above = Vec::new();
    let mut findings = Vec::new();
    for (i, (instance, widths)) in random_instances().iter().enumerate() {
        let (best, mu_star) = instance.best_arm().unwrap();
        for (c, cluster) in instance.clusters().iter().enumerate() {
            if c == best.cluster {
                continue;
            }
            programs += 1;
            let (means, beta) = (&cluster.means, widths[c]);
            let terms = cluster_terms(c, means, beta, mu_star).unwrap();
            let sol = lp_oracle(means, beta, mu_star).unwrap();
            let matrix = lp::constraint_matrix(means, beta, mu_star);
            let (all, min) = terms.closed_form_points(means, beta, mu_star);
            if !lp::is_feasible(&matrix, &all, LP_TOL)
                || min.is_some_and(|m| !lp::is_feasible(&matrix, &m, LP_TOL))
            {
                infeasible.push((i, c));
            }
            let closed = terms.lower_term();
            if sol.optimum > closed + LP_TOL {
                above.push((i, c, sol.optimum - closed));
            }
            if sol.optimum < closed - LP_FINDING_TOL {
                findings.push(format!(
                    "instance {i} cluster {c}: lp {:.6} < closed form {closed:.6}",
                    sol.optimum
                ));
            }
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    for f in &findings {
        let _ = writeln!(std::io::stderr().lock(), "  finding: {f}");
    }
    let pass = infeasible.is_empty() && above.is_empty() && elapsed < 30.0;
    report(
        "3 (LP oracle)",
        pass,
        format!(
            "{programs} cluster programs; infeasible closed-form points {}; optimum above min+{LP_TOL:.0e}: {}; \
             findings (optimum < min−{LP_FINDING_TOL:.0e}): {}; {elapsed:.2}s",
            infeasible.len(),
            above.len(),
            findings.len()
        ),
    );
    assert!(pass, "infeasible {infeasible:?} above {above:?}");
}

// ---------------------------------------------------------------------------
// Desk-scale reproductions driven by the shipped configs (seed fixed there).

fn resolved(config: &str, horizon: u64, reps: usize) -> ResolvedExperiment {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(config);
    let overrides = Overrides {
        horizon: Some(horizon),
        replications: Some(reps),
        ..Default::default()
    };
    ExperimentConfig::load(&path)
        .unwrap()
        .resolve(&overrides)
        .unwrap()
}

/// `(variant label, policy label, summary)` for every run in the experiment.
fn run_all(r: &ResolvedExperiment) -> Vec<(String, String, MonteCarloSummary)> {
    let mut out = Vec::new();
    for v in &r.variants {
        for p in &r.policies {
            let spec = r.policy_spec(p, &v.widths);
            let batch = BatchSpec {
                instance: &r.instance,
                policy: &spec,
                horizon: r.horizon,
                grid: &[r.horizon],
                replications: r.replications,
                base_seed: r.base_seed,
            };
            out.push((
                v.label.clone(),
                p.label.clone(),
                run_batch(&batch, Execution::Parallel).unwrap(),
            ));
        }
    }
    out
}

fn find<'a>(
    runs: &'a [(String, String, MonteCarloSummary)],
    variant: &str,
    policy: &str,
) -> &'a MonteCarloSummary {
    &runs
        .iter()
        .find(|(v, p, _)| v == variant && p == policy)
        .unwrap()
        .2
}

/// `(lower-regret mean, higher-regret mean, gap, combined standard error)`.
fn compare(better: &MonteCarloSummary, worse: &MonteCarloSummary) -> (f64, f64, f64, f64) {
    let gap = worse.final_mean() - better.final_mean();
    let se = better.final_stderr().hypot(worse.final_stderr());
    (better.final_mean(), worse.final_mean(), gap, se)
}

/// Not asserted: with 24 replications the expected gap is only about 2.6
/// combined standard errors, so the pre-fixed seed can land on either side.
/// The verdict is printed as-is; the larger run below guards the direction.
#[test]
fn criterion_4_separated_clusters_direction() {
    let r = resolved("separated.json", DESK_HORIZON, DESK_REPS);
    let runs = run_all(&r);
    let (clus, klucb, gap, se) = compare(find(&runs, "", "clus-ucb"), find(&runs, "", "kl-ucb"));
    report(
        "4 (separated clusters, Clus-UCB < KL-UCB, non-gating)",
        gap > SE_MARGIN * se,
        format!(
            "T={DESK_HORIZON}, {DESK_REPS} reps, seed {}: clus-ucb {clus:.1} vs kl-ucb {klucb:.1}; \
             gap {gap:.1} vs {SE_MARGIN}·SE {:.1}",
            r.base_seed,
            SE_MARGIN * se
        ),
    );

    let big = resolved("separated.json", DESK_HORIZON, 400);
    let runs = run_all(&big);
    let (clus, klucb, gap, se) = compare(find(&runs, "", "clus-ucb"), find(&runs, "", "kl-ucb"));
    let pass = gap > SE_MARGIN * se;
    report(
        "4 (power check, 400 reps)",
        pass,
        format!(
            "clus-ucb {clus:.1} vs kl-ucb {klucb:.1}; gap {gap:.1} vs {SE_MARGIN}·SE {:.1}",
            SE_MARGIN * se
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_5_tlp_mean_is_worse() {
    let r = resolved("tlp_trap.json", DESK_HORIZON, DESK_REPS);
    let runs = run_all(&r);
    let (clus, tlp, gap, se) = compare(find(&runs, "", "clus-ucb"), find(&runs, "", "tlp-mean"));
    let pass = gap > SE_MARGIN * se;
    report(
        "5 (TLP-MEAN > Clus-UCB)",
        pass,
        format!(
            "T={DESK_HORIZON}, {DESK_REPS} reps: tlp-mean {tlp:.1} vs clus-ucb {clus:.1}; gap {gap:.1} vs {SE_MARGIN}·SE {:.1}",
            SE_MARGIN * se
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_6_misspecified_widths() {
    let r = resolved("width_sweep.json", DESK_HORIZON, DESK_REPS);
    let runs = run_all(&r);
    let get = |label: &str| find(&runs, label, "clus-ucb");
    let (over, under_opt) = (get("beta_0.5_0.9"), get("beta_0.4_0.2"));
    let factor = under_opt.final_mean() / over.final_mean();
    let (reference, under_sub) = (get("beta_0.4_0.7"), get("beta_0.1_0.7"));
    let excess = under_sub.final_mean() - reference.final_mean();
    let se = under_sub.final_stderr().hypot(reference.final_stderr());
    let pass = factor >= 2.0 && excess <= SE_MARGIN * se;
    report(
        "6 (misspecification)",
        pass,
        format!(
            "β=[0.4,0.2] / β=[0.5,0.9] = {:.1}/{:.1} = {factor:.2} (≥2); β=[0.1,0.7] − β=[0.4,0.7] = {excess:.1} (≤ {:.1})",
            under_opt.final_mean(),
            over.final_mean(),
            SE_MARGIN * se
        ),
    );
    assert!(pass);
}

#[test]
#[ignore = "10^6-round horizon; run explicitly"]
fn criterion_7_pull_count_law() {
    let r = resolved("separated.json", 1_000_000, 24);
    let widths = r.variants[0].widths.clone();
    let policy = r
        .policies
        .iter()
        .find(|p| p.kind == PolicyKind::ClusUcb)
        .unwrap();
    let spec = r.policy_spec(policy, &widths);
    let batch = BatchSpec {
        instance: &r.instance,
        policy: &spec,
        horizon: r.horizon,
        grid: &[r.horizon],
        replications: r.replications,
        base_seed: r.base_seed,
    };
    let summary = run_batch(&batch, Execution::Parallel).unwrap();
    let check = expected_pull_check(&summary, &r.instance, &widths, r.horizon).unwrap();
    let mut err = std::io::stderr().lock();
    for a in &check.arms {
        let _ = writeln!(
            err,
            "  arm {}: pulls/log T {:.3} vs 1/(αL) {:.3} ({:+.1}%)",
            a.arm,
            a.empirical_rate,
            a.predicted_rate,
            100.0 * a.relative_error
        );
    }
    for q in &check.ratios {
        let _ = writeln!(
            err,
            "  cluster {} t{}/t{}: {:.3} vs {:.3} ({:+.1}%)",
            q.cluster,
            q.first,
            q.second,
            q.empirical,
            q.predicted,
            100.0 * q.relative_error
        );
    }
    drop(err);
    let rate_err = check
        .arms
        .iter()
        .map(|a| a.relative_error.abs())
        .fold(0.0, f64::max);
    let ratio_err = check
        .ratios
        .iter()
        .map(|q| q.relative_error.abs())
        .fold(0.0, f64::max);
    let pass = rate_err <= RATE_TOL && ratio_err <= RATIO_TOL;
    report(
        "7 (pull-count law)",
        pass,
        format!(
            "T=1e6, 24 reps: max rate err {:.1}% (tol {:.0}%), max ratio err {:.1}% (tol {:.0}%)",
            100.0 * rate_err,
            100.0 * RATE_TOL,
            100.0 * ratio_err,
            100.0 * RATIO_TOL
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------------

const TINY_HORIZON: u64 = 8;
const TINY_MEANS: [f64; 2] = [0.35, 0.65];
const TINY_A: f64 = 4.0;

fn tiny_instance() -> ClusteredInstance {
    ClusteredInstance::from_parts([(0.4, TINY_MEANS.to_vec())]).unwrap()
}

/// Exact expected pseudo-regret of a deterministic two-armed policy driven by
/// `choose(round, pulls, successes)`: every reward bit string is weighted by
/// the Bernoulli probabilities of the arms it ends up being fed to.
fn enumerate(mut run: impl FnMut(u32) -> ([u64; 2], f64)) -> (f64, f64) {
    let gap = TINY_MEANS[1] - TINY_MEANS[0];
    let (mut expectation, mut total) = (0.0, 0.0);
    for bits in 0..(1u32 << TINY_HORIZON) {
        let (pulls, prob) = run(bits);
        expectation += prob * gap * pulls[0] as f64;
        total += prob;
    }
    (expectation, total)
}

/// Reference KL-UCB: forced initialization, then the largest reference index
/// with ties to the lower arm. Tracks the smallest nonzero index gap, to show
/// no decision hinges on solver precision.
fn reference_episode(bits: u32, min_margin: &mut f64) -> ([u64; 2], f64) {
    let (mut pulls, mut succ, mut prob) = ([0u64; 2], [0u64; 2], 1.0);
    for n in 1..=TINY_HORIZON {
        let arm = if n <= 2 {
            (n - 1) as usize
        } else {
            let budget = ref_budget(n, TINY_A);
            let idx: Vec<f64> = (0..2)
                .map(|k| ref_kl_ucb(succ[k] as f64 / pulls[k] as f64, pulls[k], budget))
                .collect();
            // equal indices (identical statistics, or both saturated at 1) are ties
            if idx[0] != idx[1] {
                *min_margin = min_margin.min((idx[0] - idx[1]).abs());
            }
            usize::from(idx[1] > idx[0])
        };
        let reward = (bits >> (n - 1)) & 1 == 1;
        prob *= if reward {
            TINY_MEANS[arm]
        } else {
            1.0 - TINY_MEANS[arm]
        };
        pulls[arm] += 1;
        succ[arm] += reward as u64;
    }
    (pulls, prob)
}

fn library_episode(instance: &ClusteredInstance, spec: &PolicySpec, bits: u32) -> ([u64; 2], f64) {
    let mut policy: Policy = spec.build(instance).unwrap();
    let mut prob = 1.0;
    for n in 1..=TINY_HORIZON {
        let arm = policy.select();
        let reward = (bits >> (n - 1)) & 1 == 1;
        let mean = instance.mean(arm);
        prob *= if reward { mean } else { 1.0 - mean };
        policy.observe(arm, reward);
    }
    let p = policy.state().pulls();
    ([p[0], p[1]], prob)
}

fn bits_of(s: &MonteCarloSummary) -> Vec<u64> {
    s.mean_regret
        .iter()
        .chain(&s.stderr)
        .chain(&s.mean_pulls)
        .map(|x| x.to_bits())
        .collect()
}

#[test]
fn criterion_8_small_horizon_exact_oracle() {
    let instance = tiny_instance();
    let spec = PolicySpec::defaults(PolicyKind::KlUcb, &instance);
    assert_eq!(spec.params.a, TINY_A);

    let mut margin = f64::INFINITY;
    let (exact, total) = enumerate(|bits| reference_episode(bits, &mut margin));
    let (library_exact, library_total) = enumerate(|bits| library_episode(&instance, &spec, bits));
    assert!((total - 1.0).abs() < 1e-12 && (library_total - 1.0).abs() < 1e-12);
    let enumeration_agrees = (exact - library_exact).abs() < REDUCTION_TOL && margin > 1e-6;

    let reps = 1_000_000;
    let batch = BatchSpec {
        instance: &instance,
        policy: &spec,
        horizon: TINY_HORIZON,
        grid: &[TINY_HORIZON],
        replications: reps,
        base_seed: 8,
    };
    let mc = run_batch(&batch, Execution::Parallel).unwrap();
    let z = (mc.final_mean() - exact) / mc.final_stderr();

    // bitwise stability: thread counts, execution modes and reruns
    let pool = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
    };
    let separated = ClusteredInstance::from_parts([
        (0.02, vec![0.40, 0.41, 0.42]),
        (0.02, vec![0.60, 0.61, 0.62]),
    ])
    .unwrap();
    let separated_spec = PolicySpec::defaults(PolicyKind::ClusUcb, &separated);
    let separated_batch = BatchSpec {
        instance: &separated,
        policy: &separated_spec,
        horizon: 3_000,
        grid: &[10, 100, 1_000, 3_000],
        replications: 150,
        base_seed: 1,
    };
    let small = BatchSpec {
        replications: 20_000,
        ..batch
    };
    let mut stable = true;
    for b in [&small, &separated_batch] {
        let one = pool(1)
            .install(|| run_batch(b, Execution::Parallel))
            .unwrap();
        let four = pool(4)
            .install(|| run_batch(b, Execution::Parallel))
            .unwrap();
        let serial = run_batch(b, Execution::Serial).unwrap();
        let again = pool(4)
            .install(|| run_batch(b, Execution::Parallel))
            .unwrap();
        stable &= bits_of(&one) == bits_of(&four)
            && bits_of(&one) == bits_of(&serial)
            && bits_of(&one) == bits_of(&again);
        let t1 = pool(1)
            .install(|| run_traces(b, Execution::Parallel))
            .unwrap();
        let t4 = pool(4)
            .install(|| run_traces(b, Execution::Parallel))
            .unwrap();
        stable &= t1 == t4;
    }

    let pass = enumeration_agrees && z.abs() <= EXACT_SE && stable;
    report(
        "8 (small-horizon exact oracle)",
        pass,
        format!(
            "exact {exact:.9} (library replay {library_exact:.9}, min index margin {margin:.1e}); \
             MC {reps} reps {:.6} ± {:.6} (z = {z:+.2}, tol {EXACT_SE}); bitwise stable across 1/4 threads: {stable}",
            mc.final_mean(),
            mc.final_stderr()
        ),
    );
    assert!(pass);
}

#[test]
fn separated_bound_is_cross_checked_by_lp() {
    let instance = ClusteredInstance::from_parts([
        (0.02, vec![0.40, 0.41, 0.42]),
        (0.02, vec![0.60, 0.61, 0.62]),
    ])
    .unwrap();
    let r = clus_lower_bound(&instance, &instance.widths()).unwrap();
    let lp = r.lp_values[0].optimum.unwrap();
    assert!((lp - r.clusters[0].lower_term()).abs() < 1e-9);
    assert!(matches!(
        clus_lower_bound(&instance, &[0.02]),
        Err(Error::WidthCount {
            expected: 2,
            got: 1
        })
    ));
}
