use serde::Serialize;

use super::{
    brute_force_policy_search, default_feasibility_tolerance, evaluate_average, evaluate_discounted,
    feasibility_check, restricted_action_sets, transformed_relative_value_iteration, transformed_value_iteration,
    FeasibilityVerdict,
};
use crate::learners::QTable;
use crate::mdp::{reachable_from, MdpInstance, Mode, StochasticPolicy};
use crate::transform::ClipBound;
use crate::Result;

/// Solver tolerance used inside the audit, well below any audit tolerance.
const SOLVE_TOLERANCE: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Counterexample {
    /// The transformed-greedy policy plays an action outside `A(s)` on a
    /// reachable state.
    InfeasibleAction {
        state: usize,
        action: usize,
        constraint_samples: Vec<f64>,
    },
    /// Its raw-reward value differs from the constrained optimum.
    ValueMismatch {
        /// `None` for the (state-independent) gain.
        state: Option<usize>,
        greedy: f64,
        optimal: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub mode: Mode,
    pub passed: bool,
    pub tolerance: f64,
    /// Transformed `Q*` (average mode: relative, normalized at the reference
    /// state).
    pub q_star: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gain: Option<f64>,
    pub feasibility: FeasibilityVerdict,
    /// Greedy action sets of the transformed `Q*`.
    pub greedy_support: Vec<Vec<usize>>,
    /// States reachable from state 0 under the greedy support.
    pub reachable: Vec<bool>,
    /// Raw-reward value of the uniform-over-ties greedy policy (per state in
    /// discounted mode, the gain in average mode).
    pub greedy_values: Vec<f64>,
    pub optimal_values: Vec<f64>,
    pub optimal_policy: Vec<usize>,
    pub max_value_gap: f64,
    pub counterexamples: Vec<Counterexample>,
}

/// Checks that solving the transformed problem solves the constrained one.
///
/// Brute force must find a feasible policy first (its error propagates
/// otherwise). Then (i) every action the transformed-greedy policy may take
/// on a state reachable from state 0 lies in `A(s)`, and (ii) that policy's
/// exact value on the raw reward matches the brute-force optimum within
/// `tol`, on every reachable state (discounted) or in gain (average).
pub fn equivalence_audit(inst: &MdpInstance, mode: Mode, tol: f64) -> Result<AuditReport> {
    let optimum = brute_force_policy_search(inst, mode)?;
    let ftol = default_feasibility_tolerance(inst.bound_c());
    let (q, gain): (QTable, Option<f64>) = match mode {
        Mode::Discounted => {
            let bound = ClipBound::for_instance(inst, mode)?;
            (transformed_value_iteration(inst, &bound, SOLVE_TOLERANCE)?.0, None)
        }
        Mode::Average => {
            let sol = transformed_relative_value_iteration(inst, SOLVE_TOLERANCE)?;
            let g = sol.gain();
            (sol.q, Some(g))
        }
    };
    let feasibility = feasibility_check(&q, gain, ftol);
    // Ties closer than this are numerically indistinguishable at the solve
    // tolerance, so the policy mixes over them.
    let tie = 1e-8 * inst.bound_c().max(1.0);
    let support: Vec<Vec<usize>> = (0..inst.n_states()).map(|s| q.argmax_set(s, tie)).collect();
    let reachable = reachable_from(inst, &support, 0);
    let sets = restricted_action_sets(inst);
    let mut counterexamples = Vec::new();
    for (s, actions) in support.iter().enumerate().filter(|(s, _)| reachable[*s]) {
        for &a in actions.iter().filter(|a| !sets[s].contains(a)) {
            counterexamples.push(Counterexample::InfeasibleAction {
                state: s,
                action: a,
                constraint_samples: inst.constraint_samples(s, a).to_vec(),
            });
        }
    }
    let policy = StochasticPolicy::uniform_over(&support, inst.n_actions());
    let (greedy_values, optimal_values) = match mode {
        Mode::Discounted => (evaluate_discounted(inst, &policy, inst.rewards())?, optimum.values.clone()),
        Mode::Average => (vec![evaluate_average(inst, &policy, inst.rewards())?], vec![optimum.value]),
    };
    let mut max_value_gap: f64 = 0.0;
    for (i, (&g, &o)) in greedy_values.iter().zip(&optimal_values).enumerate() {
        if mode == Mode::Discounted && !reachable[i] {
            continue;
        }
        max_value_gap = max_value_gap.max((g - o).abs());
        if (g - o).abs() > tol {
            counterexamples.push(Counterexample::ValueMismatch {
                state: (mode == Mode::Discounted).then_some(i),
                greedy: g,
                optimal: o,
            });
        }
    }
    Ok(AuditReport {
        mode,
        passed: counterexamples.is_empty(),
        tolerance: tol,
        q_star: q.rows(),
        gain,
        feasibility,
        greedy_support: support,
        reachable,
        greedy_values,
        optimal_values,
        optimal_policy: optimum.policy,
        max_value_gap,
        counterexamples,
    })
}
