//! Discounted Q-learning on clipped samples from the wireless instance,
//! compared against the exact transformed solution.

use peakrl::envs::load_instance;
use peakrl::prelude::*;

fn main() -> Result<()> {
    let inst = load_instance(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/wireless.json"))?;
    let bound = ClipBound::for_instance(&inst, Mode::Discounted)?;
    let (q_star, _) = transformed_value_iteration(&inst, &bound, 1e-12)?;

    let config = LearnerConfig {
        discounted_schedule: DiscountedSchedule::new(0.7)?,
        exploration: ExplorationPolicy::constant(0.2),
        steps: 300_000,
        seed: 42,
        ..LearnerConfig::discounted()
    };
    let mut checkpoints = vec![];
    let outcome = run_learning(&inst, &config, |rec, learner| {
        if rec.step.is_power_of_two() && rec.step >= 1024 {
            checkpoints.push((rec.step, learner.q().sup_distance(&q_star)));
        }
    })?;
    for (step, err) in checkpoints {
        println!("step {step:>7}  ||Q - Q*|| = {err:.4}");
    }
    println!("violating steps {} of {}", outcome.violations, outcome.steps);
    for s in 0..inst.n_states() {
        println!(
            "state {s}: learned greedy {:?}, oracle greedy {:?}",
            outcome.q.argmax_set(s, 1e-9),
            q_star.argmax_set(s, 1e-9)
        );
    }
    Ok(())
}
