//! RVI Q-learning on the search-engine instance with each normalizing
//! functional. f(Q) should approach the optimal gain in every case.

use peakrl::envs::load_instance;
use peakrl::prelude::*;

fn main() -> Result<()> {
    let inst = load_instance(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/search_engine.json"))?;
    let exact = transformed_relative_value_iteration(&inst, 1e-12)?;
    println!("optimal gain {:.6}", exact.gain());

    for functional in [
        RviFunctional::ReferenceEntry { state: 0, action: 0 },
        RviFunctional::MeanOfTable,
        RviFunctional::MaxOfTable,
    ] {
        for schedule in [AverageSchedule::InvK, AverageSchedule::InvKLogK] {
            let config = LearnerConfig {
                functional,
                average_schedule: schedule,
                exploration: ExplorationPolicy::constant(0.2),
                steps: 200_000,
                seed: 5,
                ..LearnerConfig::average()
            };
            let out = run_learning(&inst, &config, |_, _| {})?;
            println!(
                "{functional:?} / {schedule:?}: f(Q) = {:.6}, greedy {:?}",
                functional.eval(&out.q),
                (0..inst.n_states()).map(|s| out.q.argmax_set(s, 1e-9)).collect::<Vec<_>>()
            );
        }
    }
    Ok(())
}
