//! Finite constrained MDP instances, trajectory sampling and the structural
//! checks (unichain, recurrent state) the learners rely on.

mod file;
mod policy;
mod structure;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use file::MdpFile;
pub use policy::{DeterministicPolicies, SimulationState, StochasticPolicy, VisitCounter};
pub use structure::{
    check_recurrent_state, check_unichain, find_recurrent_state, reachable_from, RecurrenceReport,
    UnichainReport, ENUMERATION_LIMIT,
};

/// Absolute tolerance on kernel row sums.
pub const KERNEL_TOLERANCE: f64 = 1e-9;

/// Relative slack on the |value| <= c bound check, so that values produced by
/// floating-point shifts exactly at the bound are not rejected.
const BOUND_SLACK: f64 = 1e-12;

/// Optimality criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Discounted,
    Average,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Discounted => f.write_str("discounted"),
            Mode::Average => f.write_str("average"),
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "discounted" => Ok(Mode::Discounted),
            "average" => Ok(Mode::Average),
            other => Err(Error::Argument(format!(
                "unknown mode '{other}' (expected 'discounted' or 'average')"
            ))),
        }
    }
}

/// A finite MDP with an objective reward table and `J` peak-constraint
/// tables.
///
/// Immutable once constructed; every constructor validates the kernel and
/// the `|value| <= bound_c` bound. Tables are stored flat:
/// kernel as `[s][a][s']`, reward as `[s][a]` and constraints as `[s][a][j]`
/// so that the `J` samples of one pair are contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct MdpInstance {
    n_states: usize,
    n_actions: usize,
    n_constraints: usize,
    kernel: Vec<f64>,
    reward: Vec<f64>,
    constraints: Vec<f64>,
    gamma: Option<f64>,
    bound_c: f64,
    recurrent_state: Option<usize>,
    reward_shift: f64,
}

impl MdpInstance {
    /// Builds an instance from nested tables.
    ///
    /// `kernel[s][a][s']`, `reward[s][a]`, `constraints[j][s][a]`.
    pub fn new(
        kernel: Vec<Vec<Vec<f64>>>,
        reward: Vec<Vec<f64>>,
        constraints: Vec<Vec<Vec<f64>>>,
        gamma: Option<f64>,
        bound_c: f64,
    ) -> Result<Self> {
        MdpFile {
            n_states: kernel.len(),
            n_actions: kernel.first().map_or(0, Vec::len),
            gamma,
            bound_c,
            kernel,
            reward,
            constraints,
            recurrent_state: None,
            reward_shift: None,
        }
        .into_instance()
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_flat(
        n_states: usize,
        n_actions: usize,
        n_constraints: usize,
        kernel: Vec<f64>,
        reward: Vec<f64>,
        constraints: Vec<f64>,
        gamma: Option<f64>,
        bound_c: f64,
        recurrent_state: Option<usize>,
        reward_shift: f64,
    ) -> Result<Self> {
        let inst = MdpInstance {
            n_states,
            n_actions,
            n_constraints,
            kernel,
            reward,
            constraints,
            gamma,
            bound_c,
            recurrent_state,
            reward_shift,
        };
        inst.validate()?;
        Ok(inst)
    }

    fn validate(&self) -> Result<()> {
        let (ns, na, nj) = (self.n_states, self.n_actions, self.n_constraints);
        if ns == 0 || na == 0 {
            return Err(Error::Validation(format!(
                "n_states and n_actions must be positive (got {ns} and {na})"
            )));
        }
        if self.kernel.len() != ns * na * ns
            || self.reward.len() != ns * na
            || self.constraints.len() != ns * na * nj
        {
            return Err(Error::Validation("table dimensions do not match sizes".into()));
        }
        if !(self.bound_c.is_finite() && self.bound_c > 0.0) {
            return Err(Error::Validation(format!(
                "bound_c must be a positive real (got {})",
                self.bound_c
            )));
        }
        if let Some(g) = self.gamma {
            if !(g > 0.0 && g < 1.0) {
                return Err(Error::Validation(format!("gamma must lie in (0,1) (got {g})")));
            }
        }
        if let Some(r) = self.recurrent_state {
            if r >= ns {
                return Err(Error::Validation(format!(
                    "recurrent_state {r} out of range (n_states = {ns})"
                )));
            }
        }
        for s in 0..ns {
            for a in 0..na {
                let row = self.kernel_row(s, a);
                if let Some((sp, p)) =
                    row.iter().enumerate().find(|(_, p)| !(p.is_finite() && (0.0..=1.0).contains(*p)))
                {
                    return Err(Error::Validation(format!(
                        "kernel entry (s={s}, a={a}, s'={sp}) = {p} is not a probability"
                    )));
                }
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > KERNEL_TOLERANCE {
                    return Err(Error::Validation(format!(
                        "kernel row (s={s}, a={a}) sums to {sum}"
                    )));
                }
            }
        }
        let limit = self.bound_c * (1.0 + BOUND_SLACK);
        for s in 0..ns {
            for a in 0..na {
                let r = self.reward(s, a);
                if !r.is_finite() || r.abs() > limit {
                    return Err(Error::Validation(format!(
                        "reward (s={s}, a={a}) = {r} exceeds bound_c = {}",
                        self.bound_c
                    )));
                }
                for (j, g) in self.constraint_samples(s, a).iter().enumerate() {
                    if !g.is_finite() || g.abs() > limit {
                        return Err(Error::Validation(format!(
                            "constraint (j={j}, s={s}, a={a}) = {g} exceeds bound_c = {}",
                            self.bound_c
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    /// Number of peak constraints `J`.
    pub fn n_constraints(&self) -> usize {
        self.n_constraints
    }

    pub fn gamma(&self) -> Option<f64> {
        self.gamma
    }

    pub fn bound_c(&self) -> f64 {
        self.bound_c
    }

    pub fn recurrent_state(&self) -> Option<usize> {
        self.recurrent_state
    }

    /// Constant added to every reward by [`shift_reward`]; subtract
    /// `shift / (1 - gamma)` (discounted) or `shift` (average) from a
    /// reported value to recover the original objective.
    pub fn reward_shift(&self) -> f64 {
        self.reward_shift
    }

    #[inline]
    pub fn kernel_row(&self, s: usize, a: usize) -> &[f64] {
        let start = (s * self.n_actions + a) * self.n_states;
        &self.kernel[start..start + self.n_states]
    }

    #[inline]
    pub fn reward(&self, s: usize, a: usize) -> f64 {
        self.reward[s * self.n_actions + a]
    }

    /// Reward table in `[s][a]` order.
    pub fn rewards(&self) -> &[f64] {
        &self.reward
    }

    /// The `J` constraint values of one state-action pair.
    #[inline]
    pub fn constraint_samples(&self, s: usize, a: usize) -> &[f64] {
        let start = (s * self.n_actions + a) * self.n_constraints;
        &self.constraints[start..start + self.n_constraints]
    }

    pub fn constraint(&self, j: usize, s: usize, a: usize) -> f64 {
        self.constraint_samples(s, a)[j]
    }

    /// Whether every reward is strictly positive.
    pub fn has_positive_rewards(&self) -> bool {
        self.reward.iter().all(|&r| r > 0.0)
    }

    /// Copy of the instance with the discount factor replaced.
    pub fn with_gamma(&self, gamma: Option<f64>) -> Result<Self> {
        let mut out = self.clone();
        out.gamma = gamma;
        out.validate()?;
        Ok(out)
    }

    pub fn with_recurrent_state(&self, state: Option<usize>) -> Result<Self> {
        let mut out = self.clone();
        out.recurrent_state = state;
        out.validate()?;
        Ok(out)
    }

    pub(crate) fn check_state(&self, s: usize) -> Result<()> {
        if s < self.n_states {
            Ok(())
        } else {
            Err(Error::Index {
                what: "state",
                index: s,
                limit: self.n_states,
            })
        }
    }

    pub(crate) fn check_action(&self, a: usize) -> Result<()> {
        if a < self.n_actions {
            Ok(())
        } else {
            Err(Error::Index {
                what: "action",
                index: a,
                limit: self.n_actions,
            })
        }
    }

    /// Draws a successor without bounds checks; callers guarantee indices.
    #[inline]
    pub(crate) fn draw_successor<R: Rng + ?Sized>(&self, s: usize, a: usize, rng: &mut R) -> usize {
        let row = self.kernel_row(s, a);
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut last_positive = 0;
        for (sp, &p) in row.iter().enumerate() {
            if p > 0.0 {
                acc += p;
                last_positive = sp;
                if u < acc {
                    return sp;
                }
            }
        }
        // Row sums may fall short of 1 by up to the kernel tolerance.
        last_positive
    }
}

/// Draws `s'` from `P(s, a, ·)`.
pub fn sample_transition<R: Rng + ?Sized>(
    inst: &MdpInstance,
    s: usize,
    a: usize,
    rng: &mut R,
) -> Result<usize> {
    inst.check_state(s)?;
    inst.check_action(a)?;
    Ok(inst.draw_successor(s, a, rng))
}

/// Default positivity shift: one tenth of the bound.
pub fn default_shift_epsilon(bound_c: f64) -> f64 {
    0.1 * bound_c
}

/// Replaces `r` with `r + c + epsilon`, making every reward strictly positive.
///
/// The new bound is `2c + epsilon`; constraints are untouched. The applied
/// constant accumulates in [`MdpInstance::reward_shift`].
pub fn shift_reward(inst: &MdpInstance, epsilon: f64) -> Result<MdpInstance> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::Argument(format!("epsilon must be positive (got {epsilon})")));
    }
    let delta = inst.bound_c + epsilon;
    let mut out = inst.clone();
    for r in &mut out.reward {
        *r += delta;
    }
    out.bound_c = 2.0 * inst.bound_c + epsilon;
    out.reward_shift += delta;
    out.validate()?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeded_rng;

    fn two_state(row: [f64; 2]) -> MdpInstance {
        MdpInstance::new(
            vec![vec![row.to_vec()], vec![vec![0.5, 0.5]]],
            vec![vec![0.5], vec![0.5]],
            vec![],
            Some(0.9),
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn deterministic_rows_always_hit_their_target() {
        let mut rng = seeded_rng(1);
        let inst = two_state([1.0, 0.0]);
        assert!((0..1000).all(|_| sample_transition(&inst, 0, 0, &mut rng).unwrap() == 0));
        let inst = two_state([0.0, 1.0]);
        assert!((0..1000).all(|_| sample_transition(&inst, 0, 0, &mut rng).unwrap() == 1));
    }

    #[test]
    fn fair_row_frequency_within_binomial_interval() {
        // sd of the frequency is 0.5/sqrt(1e5) ~ 0.0016, so [0.49, 0.51] is > 6 sd wide.
        let inst = two_state([0.5, 0.5]);
        let mut rng = seeded_rng(2024);
        let n = 100_000;
        let zeros = (0..n)
            .filter(|_| sample_transition(&inst, 0, 0, &mut rng).unwrap() == 0)
            .count();
        let freq = zeros as f64 / n as f64;
        assert!((0.49..=0.51).contains(&freq), "frequency {freq}");
    }

    #[test]
    fn sampling_is_reproducible() {
        let inst = two_state([0.3, 0.7]);
        let draw = |seed| {
            let mut rng = seeded_rng(seed);
            (0..200)
                .map(|_| sample_transition(&inst, 0, 0, &mut rng).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(5), draw(5));
    }

    #[test]
    fn out_of_range_indices_are_rejected() {
        let inst = two_state([0.5, 0.5]);
        let mut rng = seeded_rng(0);
        assert!(matches!(
            sample_transition(&inst, 2, 0, &mut rng),
            Err(Error::Index { what: "state", .. })
        ));
        assert!(matches!(
            sample_transition(&inst, 0, 1, &mut rng),
            Err(Error::Index { what: "action", .. })
        ));
    }

    #[test]
    fn kernel_row_sum_violation_names_the_pair() {
        let err = MdpInstance::new(
            vec![vec![vec![0.5, 0.5], vec![0.6, 0.3]], vec![vec![1.0, 0.0], vec![0.0, 1.0]]],
            vec![vec![0.1, 0.1], vec![0.1, 0.1]],
            vec![],
            None,
            1.0,
        )
        .unwrap_err();
        assert!(err.to_string().contains("(s=0, a=1)"), "{err}");
    }

    #[test]
    fn kernel_tolerance_admits_fifteen_digit_rows() {
        let third = 0.333_333_333_333_333;
        assert!(MdpInstance::new(
            vec![vec![vec![third, third, third]]; 3],
            vec![vec![0.1]; 3],
            vec![],
            None,
            1.0
        )
        .is_ok());
        assert!(MdpInstance::new(
            vec![vec![vec![0.5, 0.5 - 2e-9]]; 2],
            vec![vec![0.1]; 2],
            vec![],
            None,
            1.0
        )
        .is_err());
    }

    #[test]
    fn bound_violations_are_rejected() {
        let err = MdpInstance::new(
            vec![vec![vec![1.0]]],
            vec![vec![0.5]],
            vec![vec![vec![-1.5]]],
            None,
            1.0,
        )
        .unwrap_err();
        assert!(err.to_string().contains("constraint (j=0, s=0, a=0)"), "{err}");
    }

    #[test]
    fn shift_reward_formula() {
        let inst =
            MdpInstance::new(vec![vec![vec![1.0], vec![1.0]]], vec![vec![-1.0, 0.0]], vec![], None, 1.0)
                .unwrap();
        let shifted = shift_reward(&inst, 0.1).unwrap();
        assert!((shifted.reward(0, 0) - 0.1).abs() < 1e-15);
        assert!((shifted.bound_c() - 2.1).abs() < 1e-15);
        assert!((shifted.reward_shift() - 1.1).abs() < 1e-15);
        let shifted = shift_reward(&inst, 0.5).unwrap();
        assert!((shifted.reward(0, 1) - 1.5).abs() < 1e-15);
        assert!(matches!(shift_reward(&inst, 0.0), Err(Error::Argument(_))));
        assert!(matches!(shift_reward(&inst, -1.0), Err(Error::Argument(_))));
    }
}
