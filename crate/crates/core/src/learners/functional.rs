//! Normalizing functionals for RVI Q-learning.
//!
//! A valid functional `f` maps a whole table to a scalar and is Lipschitz,
//! homogeneous (`f(cQ) = c f(Q)`) and shift-equivariant
//! (`f(Q + r e) = f(Q) + r`).

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::QTable;
use crate::seeded_rng;

pub trait TableFunctional {
    fn eval(&self, q: &QTable) -> f64;
}

impl<F: Fn(&QTable) -> f64> TableFunctional for F {
    fn eval(&self, q: &QTable) -> f64 {
        self(q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RviFunctional {
    ReferenceEntry { state: usize, action: usize },
    MeanOfTable,
    MaxOfTable,
}

impl Default for RviFunctional {
    fn default() -> Self {
        RviFunctional::ReferenceEntry { state: 0, action: 0 }
    }
}

impl TableFunctional for RviFunctional {
    #[inline]
    fn eval(&self, q: &QTable) -> f64 {
        match *self {
            RviFunctional::ReferenceEntry { state, action } => q.get(state, action),
            RviFunctional::MeanOfTable => q.values().iter().sum::<f64>() / q.values().len() as f64,
            RviFunctional::MaxOfTable => q.values().iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

impl std::str::FromStr for RviFunctional {
    type Err = crate::Error;

    /// `mean`, `max`, `ref` (entry 0,0) or `ref:S,A`.
    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "mean" => Ok(RviFunctional::MeanOfTable),
            "max" => Ok(RviFunctional::MaxOfTable),
            "ref" => Ok(RviFunctional::default()),
            other => {
                let parsed = other.strip_prefix("ref:").and_then(|rest| {
                    let (s, a) = rest.split_once(',')?;
                    Some(RviFunctional::ReferenceEntry {
                        state: s.trim().parse().ok()?,
                        action: a.trim().parse().ok()?,
                    })
                });
                parsed.ok_or_else(|| {
                    crate::Error::Argument(format!(
                        "unknown functional '{other}' (expected mean, max, ref or ref:S,A)"
                    ))
                })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionalCondition {
    Lipschitz,
    Homogeneous,
    ShiftEquivariant,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionalCounterexample {
    pub condition: FunctionalCondition,
    pub table: Vec<Vec<f64>>,
    pub scalar: f64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionalReport {
    pub passes: bool,
    pub trials: usize,
    /// Largest observed `|f(Q1) - f(Q2)| / ||Q1 - Q2||_inf`.
    pub lipschitz_estimate: f64,
    /// First counterexample found for each failed condition, in condition order.
    pub counterexamples: Vec<FunctionalCounterexample>,
}

/// Observed Lipschitz ratios above this count as a failure.
pub const LIPSCHITZ_CEILING: f64 = 1e3;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

fn random_table<R: Rng>(rng: &mut R, n_states: usize, n_actions: usize, scale: f64) -> QTable {
    let values = (0..n_states * n_actions)
        .map(|_| scale * (2.0 * rng.random::<f64>() - 1.0))
        .collect();
    QTable::from_flat(n_states, n_actions, values).expect("dimensions match")
}

/// Randomized check of the three functional conditions on tables of the
/// given shape. Table magnitudes range over `1e-2..1e4` so that
/// superlinear candidates break the Lipschitz ceiling.
pub fn validate_functional(
    f: &dyn TableFunctional,
    n_states: usize,
    n_actions: usize,
    trials: usize,
    seed: u64,
) -> FunctionalReport {
    let mut rng = seeded_rng(seed);
    let mut found: Vec<FunctionalCounterexample> = Vec::new();
    let mut lipschitz_estimate: f64 = 0.0;
    let record = |found: &mut Vec<FunctionalCounterexample>, cx: FunctionalCounterexample| {
        if !found.iter().any(|c| c.condition == cx.condition) {
            found.push(cx);
        }
    };
    for t in 0..trials.max(1) {
        let scale = 10f64.powi((t % 7) as i32 - 2);
        let q = random_table(&mut rng, n_states, n_actions, scale);
        // Homogeneity is checked for nonnegative scalars only; `max` is not
        // odd, and the learners never rescale by a negative factor.
        let c = 10.0 * rng.random::<f64>();
        let r = scale * (2.0 * rng.random::<f64>() - 1.0);
        let fq = f.eval(&q);

        let scaled = f.eval(&q.scaled(c));
        if !close(scaled, c * fq) {
            record(&mut found, FunctionalCounterexample {
                condition: FunctionalCondition::Homogeneous,
                table: q.rows(),
                scalar: c,
                lhs: scaled,
                rhs: c * fq,
            });
        }
        let shifted = f.eval(&q.shifted(r));
        if !close(shifted, fq + r) {
            record(&mut found, FunctionalCounterexample {
                condition: FunctionalCondition::ShiftEquivariant,
                table: q.rows(),
                scalar: r,
                lhs: shifted,
                rhs: fq + r,
            });
        }
        let other = random_table(&mut rng, n_states, n_actions, scale);
        let dist = q.sup_distance(&other);
        if dist > 0.0 {
            let ratio = (fq - f.eval(&other)).abs() / dist;
            lipschitz_estimate = lipschitz_estimate.max(ratio);
            if !(ratio <= LIPSCHITZ_CEILING) {
                record(&mut found, FunctionalCounterexample {
                    condition: FunctionalCondition::Lipschitz,
                    table: q.rows(),
                    scalar: dist,
                    lhs: ratio,
                    rhs: LIPSCHITZ_CEILING,
                });
            }
        }
    }
    found.sort_by_key(|c| match c.condition {
        FunctionalCondition::Lipschitz => 0,
        FunctionalCondition::Homogeneous => 1,
        FunctionalCondition::ShiftEquivariant => 2,
    });
    FunctionalReport {
        passes: found.is_empty(),
        trials: trials.max(1),
        lipschitz_estimate,
        counterexamples: found,
    }
}
