use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::restricted_action_sets;
use crate::mdp::{DeterministicPolicies, MdpInstance, Mode, StochasticPolicy, ENUMERATION_LIMIT};
use crate::{Error, Result};

/// Transition matrix `P_pi` and expected one-step reward `r_pi` of a policy.
/// `reward` is a flat `[s][a]` table.
pub fn policy_transitions(inst: &MdpInstance, policy: &StochasticPolicy, reward: &[f64]) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let (ns, na) = (inst.n_states(), inst.n_actions());
    if policy.n_states() != ns || policy.n_actions() != na || reward.len() != ns * na {
        return Err(Error::Argument("policy or reward table does not match the instance".into()));
    }
    let mut p = DMatrix::zeros(ns, ns);
    let mut r = DVector::zeros(ns);
    for s in 0..ns {
        for a in 0..na {
            let w = policy.prob(s, a);
            if w == 0.0 {
                continue;
            }
            r[s] += w * reward[s * na + a];
            for (sp, &q) in inst.kernel_row(s, a).iter().enumerate() {
                p[(s, sp)] += w * q;
            }
        }
    }
    Ok((p, r))
}

/// Solves `(I - gamma P_pi) V = r_pi`.
pub fn evaluate_discounted(inst: &MdpInstance, policy: &StochasticPolicy, reward: &[f64]) -> Result<Vec<f64>> {
    let gamma = inst
        .gamma()
        .ok_or_else(|| Error::Config("discounted evaluation needs an instance with gamma".into()))?;
    let (p, r) = policy_transitions(inst, policy, reward)?;
    let n = inst.n_states();
    let a = DMatrix::identity(n, n) - p * gamma;
    let v = a
        .lu()
        .solve(&r)
        .ok_or_else(|| Error::Numeric("singular system in discounted policy evaluation".into()))?;
    Ok(v.iter().copied().collect())
}

/// Stationary distribution of `P_pi`: solves `mu (P - I) = 0` with one
/// equation replaced by `sum mu = 1`. Fails when the chain has more than one
/// recurrent class (the system is then singular).
pub fn stationary_distribution(inst: &MdpInstance, policy: &StochasticPolicy) -> Result<Vec<f64>> {
    let n = inst.n_states();
    let zero = vec![0.0; n * inst.n_actions()];
    let (p, _) = policy_transitions(inst, policy, &zero)?;
    let mut a = p.transpose() - DMatrix::identity(n, n);
    a.row_mut(n - 1).fill(1.0);
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;
    let mu = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Numeric("policy chain has no unique stationary distribution".into()))?;
    if mu.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numeric("policy chain has no unique stationary distribution".into()));
    }
    Ok(mu.iter().copied().collect())
}

/// Long-run average of `reward` under `policy`.
pub fn evaluate_average(inst: &MdpInstance, policy: &StochasticPolicy, reward: &[f64]) -> Result<f64> {
    let mu = stationary_distribution(inst, policy)?;
    let (_, r) = policy_transitions(inst, policy, reward)?;
    Ok(mu.iter().zip(r.iter()).map(|(m, x)| m * x).sum())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BruteForceResult {
    pub mode: Mode,
    /// Best deterministic policy, one action per state.
    pub policy: Vec<usize>,
    /// Discounted: `V(s)` for every state. Average: the gain repeated per
    /// state.
    pub values: Vec<f64>,
    /// Discounted: `V(0)`. Average: the gain.
    pub value: f64,
    pub policies_evaluated: u64,
}

/// Enumerates every deterministic policy with actions in `A(s)` and
/// evaluates each one exactly on the instance's reward.
///
/// Discounted: the winner maximizes `sum_s V(s)`, which for the optimal
/// policy means every state at once. Average: the winner maximizes the gain.
pub fn brute_force_policy_search(inst: &MdpInstance, mode: Mode) -> Result<BruteForceResult> {
    let sets = restricted_action_sets(inst);
    let mut policies = DeterministicPolicies::new(sets, ENUMERATION_LIMIT).map_err(|e| match e {
        Error::Infeasible(msg) => Error::Infeasible(format!("no feasible policy exists: {msg}")),
        other => other,
    })?;
    let na = inst.n_actions();
    let mut best: Option<(f64, Vec<usize>, Vec<f64>)> = None;
    let mut evaluated = 0;
    while let Some(actions) = policies.next_policy() {
        evaluated += 1;
        let policy = StochasticPolicy::deterministic(actions, na);
        let (score, values) = match mode {
            Mode::Discounted => {
                let v = evaluate_discounted(inst, &policy, inst.rewards())?;
                (v.iter().sum(), v)
            }
            Mode::Average => {
                let g = evaluate_average(inst, &policy, inst.rewards())?;
                (g, vec![g; inst.n_states()])
            }
        };
        if best.as_ref().is_none_or(|(b, _, _)| score > *b) {
            best = Some((score, actions.to_vec(), values));
        }
    }
    let (_, policy, values) = best.expect("at least one policy is enumerated");
    Ok(BruteForceResult {
        mode,
        value: values[0],
        policy,
        values,
        policies_evaluated: evaluated,
    })
}
