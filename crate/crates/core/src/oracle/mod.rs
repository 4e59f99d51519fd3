//! Exact solvers for small instances.
//!
//! These are the ground truth the learners and the transform are checked
//! against: value iteration restricted to the feasible action sets, value
//! iteration and relative value iteration on the transformed reward, and
//! exhaustive search over deterministic policies with linear-algebra
//! evaluation.

mod audit;
mod brute;
mod dp;
mod feasibility;

use serde::{Deserialize, Serialize};

use crate::mdp::MdpInstance;

pub use audit::{equivalence_audit, AuditReport, Counterexample};
pub use brute::{
    brute_force_policy_search, evaluate_average, evaluate_discounted, policy_transitions,
    stationary_distribution, BruteForceResult,
};
pub use dp::{
    constrained_value_iteration, transformed_bellman, transformed_relative_value_iteration, transformed_value_iteration,
    transformed_rvi_with_reference, RviSolution, MAX_ITERATIONS, RVI_DAMPING,
};
pub use feasibility::{default_feasibility_tolerance, feasibility_check, FeasibilityStatus, FeasibilityVerdict};

/// State values, plus the gain `v` in average mode (where `values` holds the
/// relative values `h` with `h(s_ref) = 0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueFunction {
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gain: Option<f64>,
}

/// `A(s)`: actions whose constraint samples are all nonnegative. Sets may be
/// empty.
pub fn restricted_action_sets(inst: &MdpInstance) -> Vec<Vec<usize>> {
    (0..inst.n_states())
        .map(|s| {
            (0..inst.n_actions())
                .filter(|&a| inst.constraint_samples(s, a).iter().all(|&g| g >= 0.0))
                .collect()
        })
        .collect()
}

/// `sum_s' P(s, a, s') v(s')`.
#[inline]
pub(crate) fn expect(inst: &MdpInstance, s: usize, a: usize, v: &[f64]) -> f64 {
    inst.kernel_row(s, a).iter().zip(v).map(|(p, x)| p * x).sum()
}
