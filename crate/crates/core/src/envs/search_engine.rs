use serde::{Deserialize, Serialize};

use crate::mdp::{default_shift_epsilon, shift_reward, MdpInstance};
use crate::{Error, Result};

/// Document placement with a per-impression user-value floor.
///
/// Documents arrive in a fixed cycle `0, 1, ..., n-1, 0, ...`; the action is
/// the display position. The attention values only enter through the
/// reward and constraint samples the learner observes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchEngineEnvSpec {
    /// Value `u_i` of document `i` to the engine.
    pub engine_values: Vec<f64>,
    /// Value `v_i` of document `i` to the user.
    pub user_values: Vec<f64>,
    /// Attention `A_j` of position `j`.
    pub attention: Vec<f64>,
    pub qos_floor: f64,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub bound_c: Option<f64>,
}

impl SearchEngineEnvSpec {
    pub fn n_documents(&self) -> usize {
        self.engine_values.len()
    }
}

/// Reward `u_i A_j`, constraint `v_i A_j - q`. Rewards are shifted positive
/// only when some `u_i A_j <= 0`.
pub fn compile_search_engine(spec: &SearchEngineEnvSpec) -> Result<MdpInstance> {
    let n = spec.n_documents();
    let m = spec.attention.len();
    if n == 0 || m == 0 || spec.user_values.len() != n {
        return Err(Error::Validation(format!(
            "search-engine spec needs matching non-empty value arrays (u: {n}, v: {}, A: {m})",
            spec.user_values.len()
        )));
    }
    let reward: Vec<Vec<f64>> = spec
        .engine_values
        .iter()
        .map(|u| spec.attention.iter().map(|a| u * a).collect())
        .collect();
    let margin: Vec<Vec<f64>> = spec
        .user_values
        .iter()
        .map(|v| spec.attention.iter().map(|a| v * a - spec.qos_floor).collect())
        .collect();
    let kernel: Vec<Vec<Vec<f64>>> = (0..n)
        .map(|i| {
            let mut row = vec![0.0; n];
            row[(i + 1) % n] = 1.0;
            vec![row; m]
        })
        .collect();
    let c = spec.bound_c.unwrap_or_else(|| {
        reward
            .iter()
            .chain(&margin)
            .flatten()
            .fold(0.0_f64, |acc, x| acc.max(x.abs()))
    });
    let inst = MdpInstance::new(kernel, reward, vec![margin], spec.gamma, c)?;
    if inst.has_positive_rewards() {
        Ok(inst)
    } else {
        shift_reward(&inst, default_shift_epsilon(c))
    }
}
