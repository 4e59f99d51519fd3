use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::derive_seed;
use crate::envs::{load_instance, random_instance, FeasibilityMode, RandomParams};
use crate::learners::QTable;
use crate::mdp::{check_recurrent_state, check_unichain, find_recurrent_state, MdpInstance, Mode};
use crate::oracle::{
    brute_force_policy_search, default_feasibility_tolerance, equivalence_audit, feasibility_check,
    restricted_action_sets, transformed_relative_value_iteration, transformed_value_iteration, AuditReport,
    Counterexample, FeasibilityStatus, FeasibilityVerdict,
};
use crate::transform::ClipBound;
use crate::{Error, Result};

/// Process exit status contract of the binary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitStatus {
    Success,
    ValidationFailure,
    Infeasible,
    RuntimeError,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Success => 0,
            ExitStatus::ValidationFailure => 2,
            ExitStatus::Infeasible => 3,
            ExitStatus::RuntimeError => 4,
        }
    }
}

impl From<&Error> for ExitStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Validation(_) | Error::Config(_) | Error::Parse(_) | Error::Argument(_) | Error::Index { .. } => {
                ExitStatus::ValidationFailure
            }
            Error::Infeasible(_) => ExitStatus::Infeasible,
            Error::Numeric(_) | Error::Capability(_) | Error::Csv(_) | Error::Io(_) => ExitStatus::RuntimeError,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The check could not run (instance too large to enumerate).
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
    /// Every state offers at least one action satisfying all constraints.
    pub feasible: bool,
    pub exit: ExitStatus,
}

fn check(name: &'static str, pass: bool, detail: String) -> CheckResult {
    CheckResult {
        name,
        status: if pass { CheckStatus::Pass } else { CheckStatus::Fail },
        detail,
    }
}

fn skipped_on_capability<T>(name: &'static str, r: Result<T>, f: impl FnOnce(T) -> CheckResult) -> Result<CheckResult> {
    match r {
        Ok(v) => Ok(f(v)),
        Err(Error::Capability(msg)) => Ok(CheckResult {
            name,
            status: CheckStatus::Skipped,
            detail: msg,
        }),
        Err(e) => Err(e),
    }
}

/// Runs every structural check on an already loaded instance. Loading
/// itself enforces the kernel and bound invariants.
pub fn validate_instance(inst: &MdpInstance) -> Result<ValidationReport> {
    let mut checks = vec![check(
        "bounded_tables",
        true,
        format!("kernel rows stochastic; |reward|, |constraint| <= c = {}", inst.bound_c()),
    )];
    let (ws, wa) = (0..inst.n_states())
        .flat_map(|s| (0..inst.n_actions()).map(move |a| (s, a)))
        .min_by(|x, y| inst.reward(x.0, x.1).total_cmp(&inst.reward(y.0, y.1)))
        .expect("instances are non-empty");
    checks.push(check(
        "positive_rewards",
        inst.has_positive_rewards(),
        format!("min reward {} at (s={ws}, a={wa})", inst.reward(ws, wa)),
    ));
    checks.push(skipped_on_capability("unichain", check_unichain(inst), |r| {
        let detail = match &r.violating_policy {
            Some(p) => format!("policy {p:?} induces a reducible chain"),
            None => format!("{} deterministic policies irreducible", r.policies_checked),
        };
        check("unichain", r.unichain, detail)
    })?);
    let recurrence = match inst.recurrent_state() {
        Some(s) => skipped_on_capability("recurrent_state", check_recurrent_state(inst, s), |r| {
            let detail = match (r.stranded_state, &r.violating_policy) {
                (Some(from), Some(p)) => format!("state {s} unreachable from {from} under policy {p:?}"),
                _ => format!("declared state {s} is recurrent under every policy"),
            };
            check("recurrent_state", r.recurrent, detail)
        })?,
        None => skipped_on_capability("recurrent_state", find_recurrent_state(inst), |found| match found {
            Some(s) => check("recurrent_state", true, format!("state {s} is recurrent under every policy")),
            None => check("recurrent_state", false, "no state is recurrent under every policy".into()),
        })?,
    };
    checks.push(recurrence);
    let empty: Vec<usize> = restricted_action_sets(inst)
        .iter()
        .enumerate()
        .filter(|(_, set)| set.is_empty())
        .map(|(s, _)| s)
        .collect();
    let feasible = empty.is_empty();
    let exit = if checks.iter().any(|c| c.status == CheckStatus::Fail) {
        ExitStatus::ValidationFailure
    } else if !feasible {
        ExitStatus::Infeasible
    } else {
        ExitStatus::Success
    };
    checks.push(check(
        "feasible_action_sets",
        feasible,
        if feasible {
            "every state has an action satisfying all constraints".into()
        } else {
            format!("states {empty:?} have no action satisfying all constraints")
        },
    ));
    Ok(ValidationReport { checks, feasible, exit })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub mode: Mode,
    pub clip_bound: f64,
    /// Transformed `Q*` (relative `Q*` in average mode).
    pub q_star: Vec<Vec<f64>>,
    /// `V*` (discounted) or `h*` with `h*(s_ref) = 0` (average).
    pub values: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gain: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_state: Option<usize>,
    pub feasibility: FeasibilityVerdict,
    /// First greedy action of `Q*` per state.
    pub policy: Vec<usize>,
    pub greedy_support: Vec<Vec<usize>>,
    /// Brute-force constrained optimum (`None` if infeasible or too large
    /// to enumerate).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constrained_optimum: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub audit_passed: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub counterexamples: Vec<Counterexample>,
    pub notes: Vec<String>,
    /// Constant added to every reward by the positivity shift.
    pub reward_shift: f64,
    pub exit: ExitStatus,
}

/// Mode implied by an instance: discounted iff it carries a gamma.
pub fn implied_mode(inst: &MdpInstance) -> Mode {
    if inst.gamma().is_some() {
        Mode::Discounted
    } else {
        Mode::Average
    }
}

/// Transformed DP, feasibility verdict and (when enumerable) brute force
/// plus the equivalence audit.
pub fn solve_instance(inst: &MdpInstance, mode: Mode, tol: f64) -> Result<SolveReport> {
    const SOLVE_TOL: f64 = 1e-10;
    let ftol = default_feasibility_tolerance(inst.bound_c());
    let bound = ClipBound::for_instance(inst, mode)?;
    let (q, values, gain, reference_state): (QTable, Vec<f64>, Option<f64>, Option<usize>) = match mode {
        Mode::Discounted => {
            let (q, v) = transformed_value_iteration(inst, &bound, SOLVE_TOL)?;
            (q, v.values, None, None)
        }
        Mode::Average => {
            let sol = transformed_relative_value_iteration(inst, SOLVE_TOL)?;
            (sol.q.clone(), sol.value.values.clone(), Some(sol.gain()), Some(sol.reference_state))
        }
    };
    let feasibility = feasibility_check(&q, gain, ftol);
    let tie = 1e-8 * inst.bound_c().max(1.0);
    let greedy_support: Vec<Vec<usize>> = (0..inst.n_states()).map(|s| q.argmax_set(s, tie)).collect();
    let mut notes = Vec::new();
    let (mut constrained_optimum, mut audit_passed, mut counterexamples) = (None, None, Vec::new());
    let mut infeasible = feasibility.status == FeasibilityStatus::Infeasible;
    match brute_force_policy_search(inst, mode) {
        Ok(best) => {
            constrained_optimum = Some(best.values);
            let audit: AuditReport = equivalence_audit(inst, mode, tol)?;
            audit_passed = Some(audit.passed);
            counterexamples = audit.counterexamples;
        }
        Err(Error::Infeasible(msg)) => {
            infeasible = true;
            notes.push(msg);
        }
        Err(Error::Capability(msg)) => notes.push(format!("brute force skipped: {msg}")),
        Err(e) => return Err(e),
    }
    if feasibility.status == FeasibilityStatus::Inconclusive {
        notes.push(format!("feasibility margin {} lies within +-{ftol}", feasibility.margin));
    }
    Ok(SolveReport {
        mode,
        clip_bound: bound.value(),
        policy: greedy_support.iter().map(|set| set[0]).collect(),
        q_star: q.rows(),
        values,
        gain,
        reference_state,
        feasibility,
        greedy_support,
        constrained_optimum,
        audit_passed,
        counterexamples,
        notes,
        reward_shift: inst.reward_shift(),
        exit: if infeasible { ExitStatus::Infeasible } else { ExitStatus::Success },
    })
}

/// Parameters of a random equivalence battery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditBatteryConfig {
    pub count: usize,
    pub n_states: usize,
    pub n_actions: usize,
    pub n_constraints: usize,
    pub mode: Mode,
    /// Discount factor (discounted mode only).
    pub gamma: f64,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for AuditBatteryConfig {
    fn default() -> Self {
        AuditBatteryConfig {
            count: 100,
            n_states: 4,
            n_actions: 3,
            n_constraints: 2,
            mode: Mode::Discounted,
            gamma: 0.9,
            seed: 0,
            tolerance: 1e-6,
        }
    }
}

impl AuditBatteryConfig {
    /// Generator parameters: discounted batteries carry gamma, average
    /// batteries plant a recurrent state at 0.
    pub fn params(&self) -> RandomParams {
        let p = RandomParams::new(self.n_states, self.n_actions, self.n_constraints);
        match self.mode {
            Mode::Discounted => p.with_gamma(self.gamma),
            Mode::Average => p.with_recurrent_state(0),
        }
    }

    pub fn instance(&self, i: usize) -> Result<MdpInstance> {
        random_instance(&self.params(), FeasibilityMode::GuaranteedFeasible, derive_seed(self.seed, i as u64))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditVerdict {
    pub index: usize,
    pub seed: u64,
    pub passed: bool,
    pub max_value_gap: f64,
    pub feasibility: FeasibilityStatus,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub counterexamples: Vec<Counterexample>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditBatteryReport {
    pub config: AuditBatteryConfig,
    pub passed: usize,
    pub total: usize,
    pub verdicts: Vec<AuditVerdict>,
    pub exit: ExitStatus,
}

/// Equivalence audit over `count` random guaranteed-feasible instances,
/// instance `i` generated from `derive_seed(seed, i)`.
pub fn audit_battery(config: &AuditBatteryConfig) -> Result<AuditBatteryReport> {
    if config.count == 0 {
        return Err(Error::Config("audit battery needs at least one instance".into()));
    }
    let verdicts = (0..config.count)
        .into_par_iter()
        .map(|i| {
            let inst = config.instance(i)?;
            let report = equivalence_audit(&inst, config.mode, config.tolerance)?;
            Ok(AuditVerdict {
                index: i,
                seed: derive_seed(config.seed, i as u64),
                passed: report.passed,
                max_value_gap: report.max_value_gap,
                feasibility: report.feasibility.status,
                counterexamples: report.counterexamples,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let passed = verdicts.iter().filter(|v| v.passed).count();
    Ok(AuditBatteryReport {
        config: config.clone(),
        passed,
        total: verdicts.len(),
        exit: if passed == verdicts.len() { ExitStatus::Success } else { ExitStatus::ValidationFailure },
        verdicts,
    })
}

/// Audit of a single instance file.
pub fn audit_instance(path: &Path, mode: Option<Mode>, tol: f64) -> Result<AuditReport> {
    let inst = load_instance(path)?;
    let mode = mode.unwrap_or_else(|| implied_mode(&inst));
    equivalence_audit(&inst, mode, tol)
}
