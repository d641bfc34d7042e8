//! Bernoulli KL divergences and the optimistic index inversions built on them.
//!
//! Every probability argument is a plain `f64` in `[0, 1]`. Divergences are
//! extended reals: `f64::INFINITY` is returned on support mismatch and no
//! function in this module produces `NaN` for in-range inputs.

/// Default absolute bisection width on `q`.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Bisection width matching a four-decimal index.
pub const FOUR_DECIMAL_TOL: f64 = 1e-4;

/// Confidence level `log n + a log(max(1, log n))` handed to the index inversions.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ExplorationBudget(f64);

impl ExplorationBudget {
    /// Wraps a raw budget in nats. Negative or `NaN` values collapse to 0.
    pub fn from_nats(value: f64) -> Self {
        if value > 0.0 {
            Self(value)
        } else {
            Self(0.0)
        }
    }

    pub fn nats(self) -> f64 {
        self.0
    }
}

/// `x log(x / y)` with the `0 log 0 = 0` convention.
#[inline]
fn xlogxy(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * (x / y).ln()
    }
}

/// Bernoulli KL divergence `d(p, q)`.
#[inline]
pub fn kl_bernoulli(p: f64, q: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p), "p out of range: {p}");
    debug_assert!((0.0..=1.0).contains(&q), "q out of range: {q}");
    if p == q {
        return 0.0;
    }
    if q == 0.0 || q == 1.0 {
        return f64::INFINITY;
    }
    let d = xlogxy(p, q) + xlogxy(1.0 - p, 1.0 - q);
    // rounding can push a tiny positive divergence below zero
    d.max(0.0)
}

/// One-sided divergence: `d(p, q)` when `q > p`, zero otherwise.
///
/// A target below zero (for instance `q - beta` with `beta > q`) is treated
/// as "not above `p`" and yields zero.
#[inline]
pub fn kl_plus(p: f64, q: f64) -> f64 {
    if q > p {
        kl_bernoulli(p, q.min(1.0))
    } else {
        0.0
    }
}

/// `log n + a · log(max(1, log n))`.
pub fn exploration_budget(n: u64, a: f64) -> ExplorationBudget {
    assert!(n >= 1, "round index starts at 1");
    let log_n = (n as f64).ln();
    ExplorationBudget::from_nats(log_n + a * log_n.max(1.0).ln())
}

/// Largest `q` in `[lo, 1]` where the nondecreasing `lhs(q) <= budget`; `lo` if none.
///
/// Returns the feasible end of the final bracket so the constraint always
/// holds at the returned point.
fn invert_nondecreasing(lo: f64, budget: f64, tol: f64, lhs: impl Fn(f64) -> f64) -> f64 {
    debug_assert!(tol > 0.0);
    // the target divergence is strictly positive above `lo`
    if budget <= 0.0 {
        return lo;
    }
    if lhs(1.0) <= budget {
        return 1.0;
    }
    if lhs(lo) > budget {
        return lo;
    }
    let (mut lo, mut hi) = (lo, 1.0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if lhs(mid) <= budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// KL-UCB index `sup { q >= p_hat : pulls · d(p_hat, q) <= budget }`.
pub fn kl_ucb_index(p_hat: f64, pulls: u64, budget: ExplorationBudget, tol: f64) -> f64 {
    assert!(pulls >= 1, "index needs at least one pull");
    let t = pulls as f64;
    invert_nondecreasing(p_hat, budget.nats(), tol, |q| t * kl_bernoulli(p_hat, q))
}

/// Sufficient statistics of one arm as seen by an index computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmStats {
    pub mean: f64,
    pub pulls: u64,
}

impl ArmStats {
    pub fn new(mean: f64, pulls: u64) -> Self {
        Self { mean, pulls }
    }
}

/// Left side of the clustered index constraint evaluated at `q`.
pub fn clus_ucb_constraint(target: ArmStats, others: &[ArmStats], beta: f64, q: f64) -> f64 {
    let shifted = (q - beta).max(0.0);
    let mut total = target.pulls as f64 * kl_bernoulli(target.mean, q);
    for other in others.iter().filter(|o| o.pulls > 0) {
        total += other.pulls as f64 * kl_plus(other.mean, shifted);
    }
    total
}

/// Clustered index: the KL-UCB constraint of `target` plus, for every
/// cluster-mate, its pulls times `d⁺(mate mean, q − beta)`.
///
/// When the constraint already fails at `q = target.mean`, the index is
/// `target.mean`.
pub fn clus_ucb_index(
    target: ArmStats,
    others: &[ArmStats],
    beta: f64,
    budget: ExplorationBudget,
    tol: f64,
) -> f64 {
    assert!(target.pulls >= 1, "index needs at least one pull");
    invert_nondecreasing(target.mean, budget.nats(), tol, |q| {
        clus_ucb_constraint(target, others, beta, q)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn kl_values() {
        assert_eq!(kl_bernoulli(0.5, 0.5), 0.0);
        // mpmath, 40 digits
        assert_abs_diff_eq!(
            kl_bernoulli(0.4, 0.6),
            0.081_093_021_621_632_84,
            epsilon = 1e-15
        );
        assert_eq!(kl_bernoulli(0.5, 1.0), f64::INFINITY);
        assert_eq!(kl_bernoulli(0.5, 0.0), f64::INFINITY);
        assert_eq!(kl_bernoulli(0.0, 0.0), 0.0);
        assert_eq!(kl_bernoulli(1.0, 1.0), 0.0);
        assert_abs_diff_eq!(kl_bernoulli(0.0, 0.5), 2f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(kl_bernoulli(1.0, 0.5), 2f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn kl_plus_branches() {
        assert_eq!(kl_plus(0.6, 0.4), 0.0);
        assert_eq!(kl_plus(0.3, 0.3), 0.0);
        assert_abs_diff_eq!(kl_plus(0.4, 0.6), 0.081_093_021_621_632_84, epsilon = 1e-15);
        assert_eq!(kl_plus(0.2, -0.3), 0.0);
    }

    #[test]
    fn budget_values() {
        assert_eq!(exploration_budget(1, 5.0).nats(), 0.0);
        // n = 2 < e: clamp kills the log log term
        assert_abs_diff_eq!(
            exploration_budget(2, 5.0).nats(),
            2f64.ln(),
            epsilon = 1e-15
        );
        // a = 0 leaves log n; e² is not integral so check the nearest rounds
        assert_abs_diff_eq!(
            exploration_budget(7, 0.0).nats(),
            7f64.ln(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            exploration_budget(1_000_000, 0.0).nats(),
            1e6f64.ln(),
            epsilon = 1e-12
        );
        // mpmath: 16.57097894856246
        assert_abs_diff_eq!(
            exploration_budget(1000, 5.0).nats(),
            16.570978948562465,
            epsilon = 1e-12
        );
    }

    #[test]
    fn budget_nondecreasing_in_rounds() {
        for a in [0.0, 3.0, 4.0, 5.0] {
            let mut prev = 0.0;
            for n in 1..5000 {
                let b = exploration_budget(n, a).nats();
                assert!(b >= prev, "n={n} a={a}");
                prev = b;
            }
        }
    }

    #[test]
    fn kl_ucb_examples() {
        let zero = ExplorationBudget::from_nats(0.0);
        assert_eq!(kl_ucb_index(0.5, 1000, zero, 1e-9), 0.5);
        assert_eq!(
            kl_ucb_index(1.0, 10, ExplorationBudget::from_nats(2.0), 1e-9),
            1.0
        );
        // mpmath bisection of 10·d(0.2, q) = 4.6052: 0.66711371710
        let v = kl_ucb_index(0.2, 10, ExplorationBudget::from_nats(4.6052), 1e-6);
        assert_abs_diff_eq!(v, 0.6671137171030118, epsilon = 1e-6);
    }

    #[test]
    fn clus_ucb_examples() {
        let b = ExplorationBudget::from_nats(3.1);
        let ghost = [ArmStats::new(0.9, 0), ArmStats::new(0.1, 0)];
        assert_eq!(
            clus_ucb_index(ArmStats::new(0.3, 7), &ghost, 0.05, b, 1e-9),
            kl_ucb_index(0.3, 7, b, 1e-9)
        );
        let zero = ExplorationBudget::from_nats(0.0);
        assert_eq!(
            clus_ucb_index(ArmStats::new(0.4, 50), &[], 0.02, zero, 1e-9),
            0.4
        );
        // mpmath bisection of 50·d(0.4,q) + 50·d⁺(0.4,q−0.02) = log 1e4: 0.62245056273
        let budget = ExplorationBudget::from_nats(1e4f64.ln());
        let v = clus_ucb_index(
            ArmStats::new(0.4, 50),
            &[ArmStats::new(0.4, 50)],
            0.02,
            budget,
            1e-6,
        );
        assert_abs_diff_eq!(v, 0.6224505627275776, epsilon = 1e-6);
    }

    #[test]
    fn clus_ucb_floors_when_mates_exhaust_budget() {
        // mate at 0.1 with many pulls and a zero width makes the constraint infeasible above 0.5
        let budget = ExplorationBudget::from_nats(5.0);
        let v = clus_ucb_index(
            ArmStats::new(0.5, 3),
            &[ArmStats::new(0.1, 10_000)],
            0.0,
            budget,
            1e-9,
        );
        assert_eq!(v, 0.5);
    }

    #[test]
    fn unit_width_cluster_matches_kl_ucb() {
        let budget = ExplorationBudget::from_nats(7.3);
        let mates = [ArmStats::new(0.2, 40), ArmStats::new(0.7, 90)];
        let target = ArmStats::new(0.45, 12);
        assert_eq!(
            clus_ucb_index(target, &mates, 1.0, budget, 1e-9),
            kl_ucb_index(0.45, 12, budget, 1e-9)
        );
    }

    fn prob() -> impl Strategy<Value = f64> {
        prop_oneof![Just(0.0), Just(1.0), 0.0..=1.0f64]
    }

    proptest! {
        #[test]
        fn kl_nonnegative_and_dominates_plus(p in prob(), q in prob()) {
            let d = kl_bernoulli(p, q);
            prop_assert!(d >= 0.0);
            prop_assert!(!d.is_nan());
            prop_assert!(kl_plus(p, q) <= d);
        }

        #[test]
        fn kl_monotone_away_from_p(p in 0.01..0.99f64, x in 0.0..1.0f64, y in 0.0..1.0f64) {
            let (near, far) = if x < y { (x, y) } else { (y, x) };
            // right branch: strictly increasing on [p, 1)
            let r1 = p + near * (0.999 - p);
            let r2 = p + far * (0.999 - p);
            if r2 > r1 + 1e-9 {
                prop_assert!(kl_bernoulli(p, r2) > kl_bernoulli(p, r1));
            }
            // left branch: strictly decreasing on (0, p]
            let l1 = p - near * (p - 0.001);
            let l2 = p - far * (p - 0.001);
            if l1 > l2 + 1e-9 {
                prop_assert!(kl_bernoulli(p, l2) > kl_bernoulli(p, l1));
            }
        }

        #[test]
        fn kl_ucb_monotone(p in prob(), pulls in 1u64..5000, extra in 1u64..5000, b in 0.0..30.0f64, db in 0.0..10.0f64) {
            let budget = ExplorationBudget::from_nats(b);
            let base = kl_ucb_index(p, pulls, budget, 1e-9);
            prop_assert!(kl_ucb_index(p, pulls + extra, budget, 1e-9) <= base + 1e-9);
            prop_assert!(kl_ucb_index(p, pulls, ExplorationBudget::from_nats(b + db), 1e-9) >= base - 1e-9);
        }

        #[test]
        fn clus_ucb_bracketed(
            target in (prob(), 1u64..2000),
            mates in proptest::collection::vec((prob(), 0u64..2000), 0..5),
            beta in 0.0..=1.0f64,
            b in 0.0..30.0f64,
        ) {
            let budget = ExplorationBudget::from_nats(b);
            let target = ArmStats::new(target.0, target.1);
            let mates: Vec<_> = mates.into_iter().map(|(m, t)| ArmStats::new(m, t)).collect();
            let v = clus_ucb_index(target, &mates, beta, budget, 1e-9);
            let kl = kl_ucb_index(target.mean, target.pulls, budget, 1e-9);
            prop_assert!(v >= target.mean);
            prop_assert!(v <= kl);
            if v > target.mean {
                prop_assert!(clus_ucb_constraint(target, &mates, beta, v) <= b);
            }
        }
    }
}
