//! Drives a policy by hand: select, draw a Bernoulli reward, observe.

use clus_ucb::{ClusteredInstance, Policy, PolicyKind, PolicyParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> clus_ucb::Result<()> {
    let instance = ClusteredInstance::from_parts([
        (0.02, vec![0.40, 0.41, 0.42]),
        (0.02, vec![0.60, 0.61, 0.62]),
    ])?;
    let params = PolicyParams::new(PolicyKind::ClusUcb, instance.widths()).update_interval(50);
    let mut policy = Policy::new(PolicyKind::ClusUcb, &instance.cluster_sizes(), params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    let horizon = 50_000;
    let mut reward_total = 0u64;
    for _ in 0..horizon {
        let arm = policy.select();
        let reward = rng.gen_bool(instance.mean(arm));
        reward_total += reward as u64;
        policy.observe(arm, reward);
    }

    let state = policy.state();
    let gaps = instance.gaps()?;
    let regret: f64 = gaps
        .iter()
        .zip(state.pulls())
        .map(|(g, &t)| g * t as f64)
        .sum();
    println!("rounds {horizon}  reward {reward_total}  pseudo-regret {regret:.1}");
    for (flat, id) in instance.arms().enumerate() {
        println!(
            "  arm {id}: mean {:.2}  pulls {:>6}  estimate {:.4}  index {:.4}",
            instance.mean(id),
            state.pulls()[flat],
            state.empirical_mean(flat),
            state.indices()[flat]
        );
    }
    Ok(())
}
