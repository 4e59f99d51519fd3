use serde::{Deserialize, Serialize};

use crate::learners::QTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeasibilityStatus {
    Feasible,
    Infeasible,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityVerdict {
    pub status: FeasibilityStatus,
    /// `max_a Q*(s,a)` per state, plus `v*` when given.
    pub witness: Vec<f64>,
    /// `min_s` of the witness.
    pub margin: f64,
    /// State attaining the margin.
    pub worst_state: usize,
    pub tolerance: f64,
}

/// Default verdict tolerance for an instance with bound `c`.
pub fn default_feasibility_tolerance(bound_c: f64) -> f64 {
    1e-6 * bound_c
}

/// Sign test on `m = min_s max_a (Q*(s,a) + v*)`.
///
/// Uses the per-state maximum, not the minimum over every pair: an action
/// the optimal policy never takes may have a nonpositive value without
/// making the problem infeasible. `|m| <= tol` is reported as inconclusive.
pub fn feasibility_check(qstar: &QTable, v_star: Option<f64>, tol: f64) -> FeasibilityVerdict {
    let offset = v_star.unwrap_or(0.0);
    let witness: Vec<f64> = qstar.state_values().into_iter().map(|x| x + offset).collect();
    let (worst_state, margin) = witness
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
    let status = if margin > tol {
        FeasibilityStatus::Feasible
    } else if margin < -tol {
        FeasibilityStatus::Infeasible
    } else {
        FeasibilityStatus::Inconclusive
    };
    FeasibilityVerdict {
        status,
        witness,
        margin,
        worst_state,
        tolerance: tol,
    }
}
