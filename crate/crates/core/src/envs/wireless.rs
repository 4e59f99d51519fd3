use serde::{Deserialize, Serialize};

use crate::mdp::{default_shift_epsilon, shift_reward, MdpInstance};
use crate::{Error, Result};

/// Power control over a Markov channel with a per-step QoS floor.
///
/// Objective: minimize transmit power `P(s,a)`; constraint: the QoS margin
/// `q(s,a) - b` must be nonnegative at every step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WirelessEnvSpec {
    pub n_channel_states: usize,
    pub n_bandwidth_actions: usize,
    /// Watts, `[s][a]`, strictly positive.
    pub power: Vec<Vec<f64>>,
    /// QoS measure `[s][a]`.
    pub qos: Vec<Vec<f64>>,
    pub qos_floor: f64,
    /// `[s][a][s']`.
    pub kernel: Vec<Vec<Vec<f64>>>,
    #[serde(default)]
    pub gamma: Option<f64>,
    /// Bound on |reward| and |constraint| before the shift; defaults to the
    /// largest magnitude in the tables.
    #[serde(default)]
    pub bound_c: Option<f64>,
    /// Positivity shift; defaults to `0.1 * bound_c`.
    #[serde(default)]
    pub epsilon: Option<f64>,
}

/// Compiles to `r = -P` and `r1 = q - b`, then shifts the reward positive.
/// The shift is recorded in the instance.
pub fn compile_wireless(spec: &WirelessEnvSpec) -> Result<MdpInstance> {
    let (ns, na) = (spec.n_channel_states, spec.n_bandwidth_actions);
    let shape_ok = |t: &Vec<Vec<f64>>| t.len() == ns && t.iter().all(|r| r.len() == na);
    if !shape_ok(&spec.power) || !shape_ok(&spec.qos) || spec.kernel.len() != ns {
        return Err(Error::Validation(format!(
            "wireless spec tables must be {ns} x {na}"
        )));
    }
    if let Some((s, a)) = (0..ns)
        .flat_map(|s| (0..na).map(move |a| (s, a)))
        .find(|&(s, a)| !(spec.power[s][a] > 0.0))
    {
        return Err(Error::Validation(format!(
            "power (s={s}, a={a}) must be positive"
        )));
    }
    let reward: Vec<Vec<f64>> = spec.power.iter().map(|r| r.iter().map(|p| -p).collect()).collect();
    let margin: Vec<Vec<f64>> = spec
        .qos
        .iter()
        .map(|r| r.iter().map(|q| q - spec.qos_floor).collect())
        .collect();
    let c = spec.bound_c.unwrap_or_else(|| {
        reward
            .iter()
            .chain(&margin)
            .flatten()
            .fold(0.0_f64, |m, x| m.max(x.abs()))
    });
    let raw = MdpInstance::new(spec.kernel.clone(), reward, vec![margin], spec.gamma, c)?;
    shift_reward(&raw, spec.epsilon.unwrap_or_else(|| default_shift_epsilon(c)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(power: [[f64; 2]; 2], qos: [[f64; 2]; 2]) -> WirelessEnvSpec {
        WirelessEnvSpec {
            n_channel_states: 2,
            n_bandwidth_actions: 2,
            power: power.iter().map(|r| r.to_vec()).collect(),
            qos: qos.iter().map(|r| r.to_vec()).collect(),
            qos_floor: 0.5,
            kernel: vec![vec![vec![0.7, 0.3], vec![0.4, 0.6]], vec![vec![0.2, 0.8], vec![0.5, 0.5]]],
            gamma: None,
            bound_c: Some(1.0),
            epsilon: Some(0.1),
        }
    }

    #[test]
    fn unit_power_shifts_to_epsilon() {
        let inst = compile_wireless(&spec([[1.0; 2]; 2], [[0.5; 2]; 2])).unwrap();
        for s in 0..2 {
            for a in 0..2 {
                assert!((inst.reward(s, a) - 0.1).abs() < 1e-12);
                // q = b: margin is exactly zero, i.e. feasible.
                assert_eq!(inst.constraint(0, s, a), 0.0);
            }
        }
        assert!((inst.reward_shift() - 1.1).abs() < 1e-12);
        assert!((inst.bound_c() - 2.1).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_shapes_and_power() {
        let mut bad = spec([[1.0; 2]; 2], [[0.5; 2]; 2]);
        bad.power.pop();
        assert!(compile_wireless(&bad).is_err());
        let bad = spec([[1.0, 0.0], [1.0, 1.0]], [[0.5; 2]; 2]);
        assert!(compile_wireless(&bad).is_err());
    }
}
