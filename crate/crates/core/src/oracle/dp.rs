use super::{expect, restricted_action_sets, ValueFunction};
use crate::learners::QTable;
use crate::mdp::{MdpInstance, Mode, StochasticPolicy};
use crate::transform::{transform_table, ClipBound};
use crate::{Error, Result};

/// Iteration cap shared by every iterative solver.
pub const MAX_ITERATIONS: usize = 1_000_000;

/// Self-loop weight of the aperiodicity transform used by relative value
/// iteration: `P' = tau I + (1 - tau) P`.
pub const RVI_DAMPING: f64 = 0.5;

fn discount(inst: &MdpInstance) -> Result<f64> {
    inst.gamma()
        .ok_or_else(|| Error::Config("discounted solver needs an instance with gamma".into()))
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Error::Argument(format!("tolerance must be positive (got {tol})")))
    }
}

/// Value iteration with actions restricted to `A(s)`.
///
/// Stops once the sup-norm change drops below `tol (1 - gamma) / (2 gamma)`,
/// which puts the result within `tol` of the constrained optimum. Any empty
/// `A(s)` makes the instance infeasible.
pub fn constrained_value_iteration(inst: &MdpInstance, tol: f64) -> Result<(ValueFunction, StochasticPolicy)> {
    let gamma = discount(inst)?;
    check_tol(tol)?;
    let sets = restricted_action_sets(inst);
    if let Some(s) = sets.iter().position(Vec::is_empty) {
        return Err(Error::Infeasible(format!("state {s} has no action satisfying every constraint")));
    }
    let threshold = tol * (1.0 - gamma) / (2.0 * gamma);
    let backup = |v: &[f64], s: usize| {
        sets[s]
            .iter()
            .map(|&a| (a, inst.reward(s, a) + gamma * expect(inst, s, a, v)))
            .fold((usize::MAX, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
    };
    let mut v = vec![0.0; inst.n_states()];
    for _ in 0..MAX_ITERATIONS {
        let next: Vec<f64> = (0..inst.n_states()).map(|s| backup(&v, s).1).collect();
        let change = sup_diff(&next, &v);
        v = next;
        if change < threshold {
            let actions: Vec<usize> = (0..inst.n_states()).map(|s| backup(&v, s).0).collect();
            let policy = StochasticPolicy::deterministic(&actions, inst.n_actions());
            return Ok((ValueFunction { values: v, gain: None }, policy));
        }
    }
    Err(Error::Numeric(format!(
        "constrained value iteration did not reach tolerance {tol} in {MAX_ITERATIONS} iterations"
    )))
}

/// One application of the transformed Bellman operator
/// `(TQ)(s,a) = R(s,a) + gamma sum_s' P(s,a,s') max_a' Q(s',a')`.
pub fn transformed_bellman(inst: &MdpInstance, bound: &ClipBound, q: &QTable) -> Result<QTable> {
    let gamma = discount(inst)?;
    if bound.mode() != Mode::Discounted {
        return Err(Error::Argument("transformed Bellman operator needs a discounted clip bound".into()));
    }
    Ok(bellman_with_table(inst, &transform_table(inst, bound), gamma, q))
}

fn bellman_with_table(inst: &MdpInstance, table: &[f64], gamma: f64, q: &QTable) -> QTable {
    let v = q.state_values();
    let na = inst.n_actions();
    let values = (0..inst.n_states())
        .flat_map(|s| (0..na).map(move |a| (s, a)))
        .map(|(s, a)| table[s * na + a] + gamma * expect(inst, s, a, &v))
        .collect();
    QTable::from_flat(inst.n_states(), na, values).expect("dimensions match")
}

/// Exact `Q*` of the transformed discounted problem, and `V*(s) = max_a Q*`.
///
/// Same stopping rule as [`constrained_value_iteration`], applied to `Q`.
pub fn transformed_value_iteration(inst: &MdpInstance, bound: &ClipBound, tol: f64) -> Result<(QTable, ValueFunction)> {
    let gamma = discount(inst)?;
    check_tol(tol)?;
    if bound.mode() != Mode::Discounted {
        return Err(Error::Argument("transformed value iteration needs a discounted clip bound".into()));
    }
    let table = transform_table(inst, bound);
    let threshold = tol * (1.0 - gamma) / (2.0 * gamma);
    let mut q = QTable::new(inst.n_states(), inst.n_actions(), 0.0);
    for _ in 0..MAX_ITERATIONS {
        let next = bellman_with_table(inst, &table, gamma, &q);
        let change = next.sup_distance(&q);
        q = next;
        if change < threshold {
            let values = q.state_values();
            return Ok((q, ValueFunction { values, gain: None }));
        }
    }
    Err(Error::Numeric(format!(
        "transformed value iteration did not reach tolerance {tol} in {MAX_ITERATIONS} iterations"
    )))
}

/// Output of relative value iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct RviSolution {
    /// `Q*(s,a) = R(s,a) - v* + sum_s' P(s,a,s') h*(s')`.
    pub q: QTable,
    /// `h*` with `h*(s_ref) = 0`, and the gain `v*`.
    pub value: ValueFunction,
    pub reference_state: usize,
    pub iterations: usize,
}

impl RviSolution {
    pub fn gain(&self) -> f64 {
        self.value.gain.expect("average-mode solution carries a gain")
    }
}

/// Relative value iteration on the transformed average-reward problem,
/// normalized at the declared recurrent state (state 0 if none).
pub fn transformed_relative_value_iteration(inst: &MdpInstance, tol: f64) -> Result<RviSolution> {
    transformed_rvi_with_reference(inst, inst.recurrent_state().unwrap_or(0), tol)
}

/// Relative value iteration normalized at `s_ref`.
///
/// Iterates on the aperiodic kernel `P' = tau I + (1 - tau) P`, which has the
/// same gain and greedy actions as `P` and relative values `h' = h / (1 - tau)`,
/// so periodic chains converge too. Stops when the span of `T h' - h'` is
/// below `tol`; the gain then lies within `tol` of the returned value.
pub fn transformed_rvi_with_reference(inst: &MdpInstance, s_ref: usize, tol: f64) -> Result<RviSolution> {
    inst.check_state(s_ref)?;
    check_tol(tol)?;
    let bound = ClipBound::for_instance(inst, Mode::Average)?;
    let table = transform_table(inst, &bound);
    let (ns, na) = (inst.n_states(), inst.n_actions());
    let tau = RVI_DAMPING;
    let mut h = vec![0.0; ns];
    let mut spans: Vec<f64> = Vec::new();
    for it in 1..=MAX_ITERATIONS {
        let w: Vec<f64> = (0..ns)
            .map(|s| {
                let own = tau * h[s];
                (0..na)
                    .map(|a| table[s * na + a] + own + (1.0 - tau) * expect(inst, s, a, &h))
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
        let (lo, hi) = w
            .iter()
            .zip(&h)
            .map(|(x, y)| x - y)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| (lo.min(d), hi.max(d)));
        let span = hi - lo;
        let gain = w[s_ref];
        h = w.iter().map(|x| x - gain).collect();
        if spans.len() == 8 {
            spans.remove(0);
        }
        spans.push(span);
        if !span.is_finite() {
            break;
        }
        if span < tol {
            let rel: Vec<f64> = h.iter().map(|x| (1.0 - tau) * x).collect();
            let values = (0..ns)
                .flat_map(|s| (0..na).map(move |a| (s, a)))
                .map(|(s, a)| table[s * na + a] - gain + expect(inst, s, a, &rel))
                .collect();
            return Ok(RviSolution {
                q: QTable::from_flat(ns, na, values)?,
                value: ValueFunction {
                    values: rel,
                    gain: Some(gain),
                },
                reference_state: s_ref,
                iterations: it,
            });
        }
    }
    Err(Error::Numeric(format!(
        "relative value iteration did not converge (tol {tol}); last spans {spans:?}"
    )))
}

fn sup_diff(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}
