//! Counts per-constraint violations during learning on the benchmark
//! instance, with constant and decaying exploration.

use peakrl::envs::{benchmark_instance, benchmark_violating_action};
use peakrl::prelude::*;

fn main() -> Result<()> {
    let inst = benchmark_instance(4, Some(0.9))?;
    println!(
        "violating actions per state: {:?}",
        (0..inst.n_states()).map(benchmark_violating_action).collect::<Vec<_>>()
    );
    for exploration in [ExplorationPolicy::constant(0.1), ExplorationPolicy::inverse_decay(0.5, 0.0, 1000.0)] {
        let config = LearnerConfig { exploration, steps: 200_000, seed: 3, ..LearnerConfig::discounted() };
        let mut per_constraint = vec![0u64; inst.n_constraints()];
        let out = run_learning(&inst, &config, |rec, _| {
            for (j, n) in per_constraint.iter_mut().enumerate() {
                *n += u64::from(rec.violated(j));
            }
        })?;
        println!("{:?}: {} violating steps, by constraint {per_constraint:?}", exploration.decay, out.violations);
    }
    Ok(())
}
