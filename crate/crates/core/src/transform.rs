//! Clipped Lagrangian reward transform.
//!
//! For a reward sample `r` and constraint samples `g_1..g_J` the learner
//! optimizes
//!
//! ```text
//! R = max(-B, min_{lambda >= 0} r + sum_j lambda_j g_j)
//! ```
//!
//! The inner minimum is `r` when every `g_j >= 0` (take `lambda = 0`) and
//! `-inf` otherwise, so `R` is either `r` or `-B`. No multiplier is ever
//! stored. The clip level `B` is `c * gamma / (1 - gamma)` for discounted
//! rewards and `c` for average rewards.

use serde::{Deserialize, Serialize};

use crate::mdp::{MdpInstance, Mode};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClipBound {
    mode: Mode,
    value: f64,
}

impl ClipBound {
    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// The clip level `B`; violating samples map to `-B`.
    pub fn value(&self) -> f64 {
        self.value
    }

    /// Clip bound for an instance, using its `bound_c` and (in discounted
    /// mode) its discount factor.
    pub fn for_instance(inst: &MdpInstance, mode: Mode) -> Result<Self> {
        let gamma = match mode {
            Mode::Discounted => Some(inst.gamma().ok_or_else(|| {
                Error::Config("discounted mode needs an instance with gamma".into())
            })?),
            Mode::Average => None,
        };
        clip_bound(inst.bound_c(), gamma, mode)
    }
}

pub fn clip_bound(c: f64, gamma: Option<f64>, mode: Mode) -> Result<ClipBound> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::Argument(format!("bound c must be positive (got {c})")));
    }
    let value = match (mode, gamma) {
        (Mode::Discounted, Some(g)) if g > 0.0 && g < 1.0 => c * g / (1.0 - g),
        (Mode::Discounted, Some(g)) => {
            return Err(Error::Argument(format!("gamma must lie in (0,1) (got {g})")))
        }
        (Mode::Discounted, None) => {
            return Err(Error::Argument("discounted clip bound needs gamma".into()))
        }
        (Mode::Average, None) => c,
        (Mode::Average, Some(_)) => {
            return Err(Error::Argument("average-reward clip bound takes no gamma".into()))
        }
    };
    Ok(ClipBound { mode, value })
}

/// Closed form of `max(-B, min_{lambda >= 0} r + lambda . g)`.
///
/// A constraint sample of exactly zero counts as satisfied.
#[inline]
pub fn transform_sample(r: f64, constraint_samples: &[f64], bound: &ClipBound) -> f64 {
    if constraint_samples.iter().all(|&g| g >= 0.0) {
        r
    } else {
        -bound.value
    }
}

/// Entrywise transform of a whole instance, `[s][a]` order. Only the oracles
/// materialize this table.
pub fn transform_table(inst: &MdpInstance, bound: &ClipBound) -> Vec<f64> {
    let mut out = Vec::with_capacity(inst.n_states() * inst.n_actions());
    for s in 0..inst.n_states() {
        for a in 0..inst.n_actions() {
            out.push(transform_sample(inst.reward(s, a), inst.constraint_samples(s, a), bound));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(c: f64, g: f64) -> ClipBound {
        clip_bound(c, Some(g), Mode::Discounted).unwrap()
    }

    #[test]
    fn clip_bound_values() {
        assert!((disc(1.0, 0.9).value() - 9.0).abs() < 1e-12);
        assert!((disc(1.0, 0.5).value() - 1.0).abs() < 1e-15);
        assert_eq!(clip_bound(2.5, None, Mode::Average).unwrap().value(), 2.5);
    }

    #[test]
    fn clip_bound_argument_errors() {
        assert!(clip_bound(1.0, Some(1.0), Mode::Discounted).is_err());
        assert!(clip_bound(1.0, Some(0.0), Mode::Discounted).is_err());
        assert!(clip_bound(1.0, None, Mode::Discounted).is_err());
        assert!(clip_bound(1.0, Some(0.5), Mode::Average).is_err());
        assert!(clip_bound(0.0, None, Mode::Average).is_err());
    }

    #[test]
    fn sample_examples() {
        let b = disc(1.0, 0.9);
        assert_eq!(transform_sample(0.5, &[0.2, 0.1], &b), 0.5);
        assert!((transform_sample(0.5, &[0.2, -0.01], &b) + 9.0).abs() < 1e-12);
        assert_eq!(transform_sample(0.7, &[], &b), 0.7);
        assert_eq!(transform_sample(0.5, &[0.0], &b), 0.5);
        assert_eq!(transform_sample(0.5, &[-0.0], &b), 0.5);
    }

    #[test]
    fn table_examples() {
        let inst = MdpInstance::new(
            vec![vec![vec![1.0], vec![1.0]]],
            vec![vec![1.0, 1.0]],
            vec![vec![vec![0.2, -0.1]]],
            Some(0.5),
            1.0,
        )
        .unwrap();
        let b = ClipBound::for_instance(&inst, Mode::Discounted).unwrap();
        assert_eq!(transform_table(&inst, &b), vec![1.0, -1.0]);
    }
}
