use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// How the exploration probability evolves with the step count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EpsilonDecay {
    Constant,
    /// `epsilon_k = start * scale / (scale + k)`.
    Inverse { scale: f64 },
}

/// Epsilon-greedy exploration with a floor.
///
/// A positive floor keeps every action's selection probability bounded
/// away from zero; a zero floor is allowed for decay-to-zero runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExplorationPolicy {
    pub epsilon_start: f64,
    pub epsilon_floor: f64,
    pub decay: EpsilonDecay,
}

impl Default for ExplorationPolicy {
    fn default() -> Self {
        ExplorationPolicy::constant(0.05)
    }
}

impl ExplorationPolicy {
    pub fn constant(epsilon: f64) -> Self {
        ExplorationPolicy {
            epsilon_start: epsilon,
            epsilon_floor: epsilon,
            decay: EpsilonDecay::Constant,
        }
    }

    pub fn inverse_decay(start: f64, floor: f64, scale: f64) -> Self {
        ExplorationPolicy {
            epsilon_start: start,
            epsilon_floor: floor,
            decay: EpsilonDecay::Inverse { scale },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if !unit(self.epsilon_start) || !unit(self.epsilon_floor) {
            return Err(Error::Config("exploration probabilities must lie in [0,1]".into()));
        }
        if self.epsilon_floor > self.epsilon_start {
            return Err(Error::Config("epsilon_floor exceeds epsilon_start".into()));
        }
        if let EpsilonDecay::Inverse { scale } = self.decay {
            if !(scale > 0.0 && scale.is_finite()) {
                return Err(Error::Config("decay scale must be positive".into()));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn epsilon(&self, step: u64) -> f64 {
        let eps = match self.decay {
            EpsilonDecay::Constant => self.epsilon_start,
            EpsilonDecay::Inverse { scale } => self.epsilon_start * scale / (scale + step as f64),
        };
        eps.max(self.epsilon_floor)
    }

    /// Picks an action: uniform with probability `epsilon`, otherwise
    /// uniform among the actions within `tie_tolerance` of the row maximum.
    #[inline]
    pub fn choose<R: Rng + ?Sized>(&self, row: &[f64], step: u64, tie_tolerance: f64, rng: &mut R) -> usize {
        if rng.random::<f64>() < self.epsilon(step) {
            return rng.random_range(0..row.len());
        }
        let best = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let threshold = best - tie_tolerance;
        let ties = row.iter().filter(|&&q| q >= threshold).count();
        let mut pick = if ties > 1 { rng.random_range(0..ties) } else { 0 };
        for (a, &q) in row.iter().enumerate() {
            if q >= threshold {
                if pick == 0 {
                    return a;
                }
                pick -= 1;
            }
        }
        unreachable!("row maximum is always within tolerance of itself")
    }
}
