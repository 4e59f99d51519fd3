//! Document placement with a user-value floor.
//!
//! With positive values the top slot maximizes both the engine reward and
//! the user margin, so the floor mostly decides feasibility. Once some
//! document clears the floor in no slot, the instance is infeasible; in
//! average mode the clipped gain alone does not reveal that, so the
//! structural check on `A(s)` is reported next to it.

use peakrl::envs::{compile_search_engine, SearchEngineEnvSpec};
use peakrl::prelude::*;

fn main() -> Result<()> {
    for floor in [-10.0, 0.1, 0.25, 0.35] {
        let spec = SearchEngineEnvSpec {
            engine_values: vec![1.0, 0.6, 0.9],
            user_values: vec![0.3, 1.0, 0.7],
            attention: vec![1.0, 0.6, 0.25],
            qos_floor: floor,
            gamma: None,
            bound_c: None,
        };
        let inst = compile_search_engine(&spec)?;
        let allowed = restricted_action_sets(&inst);
        let sol = transformed_relative_value_iteration(&inst, 1e-12)?;
        let placement: Vec<_> = (0..spec.n_documents()).map(|i| sol.q.argmax_set(i, 1e-9)).collect();
        let verdict = if allowed.iter().all(|a| !a.is_empty()) { "feasible" } else { "INFEASIBLE" };
        println!(
            "floor {floor:>5}: allowed slots {allowed:?} -> {verdict}, clipped gain {:.4}, greedy {placement:?}",
            sol.gain() - inst.reward_shift()
        );
    }
    Ok(())
}
