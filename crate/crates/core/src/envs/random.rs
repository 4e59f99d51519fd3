use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::mdp::MdpInstance;
use crate::{seeded_rng, Error, Result};

/// Sign structure planted in a random instance's constraint tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeasibilityMode {
    /// Every state has at least one action whose constraints are all >= 0.
    GuaranteedFeasible,
    /// One state has a strictly negative constraint on every action.
    GuaranteedInfeasible,
    /// Constraint values uniform in `[-c, c)` with no planting.
    UnconstrainedRandom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomParams {
    pub n_states: usize,
    pub n_actions: usize,
    pub n_constraints: usize,
    #[serde(default = "one")]
    pub bound_c: f64,
    #[serde(default)]
    pub gamma: Option<f64>,
    /// State that receives extra probability mass from every row, making it
    /// recurrent under every policy; recorded in the instance.
    #[serde(default)]
    pub recurrent_state: Option<usize>,
    #[serde(default = "default_min_entry")]
    pub min_kernel_entry: f64,
}

fn one() -> f64 {
    1.0
}

fn default_min_entry() -> f64 {
    0.01
}

/// Probability mass every row sends to a planted recurrent state.
const RECURRENT_MASS: f64 = 0.2;

impl RandomParams {
    pub fn new(n_states: usize, n_actions: usize, n_constraints: usize) -> Self {
        RandomParams {
            n_states,
            n_actions,
            n_constraints,
            bound_c: 1.0,
            gamma: None,
            recurrent_state: None,
            min_kernel_entry: default_min_entry(),
        }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = Some(gamma);
        self
    }

    pub fn with_recurrent_state(mut self, s: usize) -> Self {
        self.recurrent_state = Some(s);
        self
    }

    pub fn with_bound(mut self, c: f64) -> Self {
        self.bound_c = c;
        self
    }
}

/// Reproducible random instance: Dirichlet kernel rows floored at
/// `min_kernel_entry`, rewards uniform in `(0, c]`, constraint signs planted
/// per `mode`.
pub fn random_instance(params: &RandomParams, mode: FeasibilityMode, seed: u64) -> Result<MdpInstance> {
    let (ns, na, nj) = (params.n_states, params.n_actions, params.n_constraints);
    let c = params.bound_c;
    if ns == 0 || na == 0 {
        return Err(Error::Argument("sizes must be positive".into()));
    }
    if mode == FeasibilityMode::GuaranteedInfeasible && nj == 0 {
        return Err(Error::Argument("an infeasible instance needs at least one constraint".into()));
    }
    let planted = if params.recurrent_state.is_some() { RECURRENT_MASS } else { 0.0 };
    let floor_mass = params.min_kernel_entry * ns as f64;
    if !(params.min_kernel_entry >= 0.0) || floor_mass + planted >= 1.0 {
        return Err(Error::Argument(format!(
            "min_kernel_entry {} is too large for {ns} states",
            params.min_kernel_entry
        )));
    }
    if let Some(r) = params.recurrent_state {
        if r >= ns {
            return Err(Error::Argument(format!("recurrent_state {r} out of range")));
        }
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Argument("bound_c must be positive".into()));
    }

    let mut rng = seeded_rng(seed);
    let free = 1.0 - floor_mass - planted;
    let mut kernel = Vec::with_capacity(ns * na * ns);
    for _ in 0..ns * na {
        let weights: Vec<f64> = (0..ns).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
        let total: f64 = weights.iter().sum();
        let mut row: Vec<f64> = weights
            .iter()
            .map(|w| params.min_kernel_entry + free * w / total)
            .collect();
        if let Some(r) = params.recurrent_state {
            row[r] += planted;
        }
        // Put rounding residue on the largest entry.
        let residue = 1.0 - row.iter().sum::<f64>();
        let imax = (0..ns).max_by(|&i, &j| row[i].total_cmp(&row[j])).unwrap_or(0);
        row[imax] += residue;
        kernel.extend(row);
    }

    let reward: Vec<f64> = (0..ns * na).map(|_| c * (1.0 - rng.random::<f64>())).collect();

    let mut constraints: Vec<f64> = (0..ns * na * nj).map(|_| c * (2.0 * rng.random::<f64>() - 1.0)).collect();
    let bad_state = match mode {
        FeasibilityMode::GuaranteedInfeasible => Some(rng.random_range(0..ns)),
        _ => None,
    };
    if mode != FeasibilityMode::UnconstrainedRandom && nj > 0 {
        for s in 0..ns {
            if Some(s) == bad_state {
                for a in 0..na {
                    let j = rng.random_range(0..nj);
                    constraints[(s * na + a) * nj + j] = -c * (1.0 - rng.random::<f64>());
                }
            } else {
                let safe = rng.random_range(0..na);
                for j in 0..nj {
                    constraints[(s * na + safe) * nj + j] = c * rng.random::<f64>();
                }
            }
        }
    }

    MdpInstance::from_flat(
        ns,
        na,
        nj,
        kernel,
        reward,
        constraints,
        params.gamma,
        c,
        params.recurrent_state,
        0.0,
    )
}
