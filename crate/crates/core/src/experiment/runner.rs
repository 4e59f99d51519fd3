use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use super::{derive_seed, quantile, ExperimentConfig, LogSchedule, MetricsWriter};
use crate::learners::{run_learning, LearnerConfig, QTable, TableFunctional, TIE_TOLERANCE};
use crate::mdp::{MdpInstance, Mode};
use crate::oracle::{transformed_relative_value_iteration, transformed_value_iteration};
use crate::transform::ClipBound;
use crate::{Error, Result};

/// What learner runs are scored against.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleTarget {
    /// Fixed point the learner should reach. Discounted: the transformed
    /// `Q*`. Average: the relative `Q*` shifted so that `f(Q) = v*`, which is
    /// the unique fixed point of the RVI update for the configured `f`.
    pub q: QTable,
    /// Greedy action sets of `Q*`.
    pub optimal_sets: Vec<Vec<usize>>,
    pub gain: Option<f64>,
}

impl OracleTarget {
    pub fn compute(inst: &MdpInstance, learner: &LearnerConfig, tol: f64) -> Result<Self> {
        let tie = 1e-8 * inst.bound_c().max(1.0);
        let (q, gain) = match learner.mode {
            Mode::Discounted => {
                let bound = ClipBound::for_instance(inst, Mode::Discounted)?;
                (transformed_value_iteration(inst, &bound, tol)?.0, None)
            }
            Mode::Average => {
                let sol = transformed_relative_value_iteration(inst, tol)?;
                let v = sol.gain();
                let offset = v - learner.functional.eval(&sol.q);
                (sol.q.shifted(offset), Some(v))
            }
        };
        let optimal_sets = (0..inst.n_states()).map(|s| q.argmax_set(s, tie)).collect();
        Ok(OracleTarget { q, optimal_sets, gain })
    }

    /// Learned greedy actions all lie in the optimal sets.
    pub fn policy_matches(&self, q: &QTable) -> bool {
        (0..q.n_states()).all(|s| {
            q.argmax_set(s, TIE_TOLERANCE)
                .iter()
                .all(|a| self.optimal_sets[s].contains(a))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicationResult {
    pub replication: usize,
    pub seed: u64,
    pub steps: u64,
    pub violations: u64,
    /// `||Q_final - Q*||_inf`.
    pub final_error: Option<f64>,
    /// Average mode: `f(Q_final)` and its distance to `v*`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_f_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_error: Option<f64>,
    pub policy_match: Option<bool>,
    pub greedy_support: Vec<Vec<usize>>,
    pub metrics_file: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub mode: Mode,
    pub replications: usize,
    pub steps: u64,
    pub master_seed: u64,
    pub seed_rule: &'static str,
    pub oracle: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_gain: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimal_sets: Option<Vec<Vec<usize>>>,
    pub final_error_median: Option<f64>,
    /// First and third quartile.
    pub final_error_iqr: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_error_median: Option<f64>,
    pub total_violations: u64,
    pub policy_matches: Option<usize>,
    pub results: Vec<ReplicationResult>,
}

pub const SEED_RULE: &str = "splitmix64(master + r * 0x9E3779B97F4A7C15)";

/// Runs every replication in parallel, writing `metrics_rep{r}.csv` per
/// replication and `summary.json` to the output directory.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentSummary> {
    config.validate()?;
    let inst = config
        .instance
        .as_ref()
        .expect("validated configs carry an instance")
        .load()?;
    let learner = LearnerConfig {
        mode: config.mode,
        steps: config.steps,
        ..config.learner.clone()
    };
    learner.check_against(&inst)?;
    let target = if config.oracle {
        Some(OracleTarget::compute(&inst, &learner, config.tolerance)?)
    } else {
        None
    };
    std::fs::create_dir_all(&config.out_dir)?;
    let results = (0..config.replications)
        .into_par_iter()
        .map(|r| run_replication(&inst, &learner, target.as_ref(), config, r))
        .collect::<Result<Vec<_>>>()?;

    let errors: Vec<f64> = results.iter().filter_map(|r| r.final_error).collect();
    let f_errors: Vec<f64> = results.iter().filter_map(|r| r.f_error).collect();
    let summary = ExperimentSummary {
        mode: config.mode,
        replications: config.replications,
        steps: config.steps,
        master_seed: config.seed,
        seed_rule: SEED_RULE,
        oracle: config.oracle,
        oracle_gain: target.as_ref().and_then(|t| t.gain),
        optimal_sets: target.as_ref().map(|t| t.optimal_sets.clone()),
        final_error_median: quantile(&errors, 0.5),
        final_error_iqr: quantile(&errors, 0.25).zip(quantile(&errors, 0.75)).map(|(a, b)| [a, b]),
        f_error_median: quantile(&f_errors, 0.5),
        total_violations: results.iter().map(|r| r.violations).sum(),
        policy_matches: target
            .as_ref()
            .map(|_| results.iter().filter(|r| r.policy_match == Some(true)).count()),
        results,
    };
    let text = serde_json::to_string_pretty(&summary)?;
    std::fs::write(config.out_dir.join("summary.json"), text + "\n")?;
    Ok(summary)
}

fn run_replication(
    inst: &MdpInstance,
    learner: &LearnerConfig,
    target: Option<&OracleTarget>,
    config: &ExperimentConfig,
    r: usize,
) -> Result<ReplicationResult> {
    let seed = derive_seed(config.seed, r as u64);
    let cfg = LearnerConfig {
        seed,
        ..learner.clone()
    };
    let file = config.out_dir.join(format!("metrics_rep{r:03}.csv"));
    let mut writer = MetricsWriter::create(&file, cfg.mode)?;
    let mut schedule = LogSchedule::default();
    let mut cumulative = 0u64;
    let mut reward_sum = 0.0;
    let mut write_error: Option<Error> = None;
    let total = cfg.steps;
    let outcome = run_learning(inst, &cfg, |rec, agent| {
        cumulative += u64::from(rec.any_violation());
        reward_sum += rec.raw_reward;
        if write_error.is_some() || !(schedule.should_log(rec.step) || rec.step == total) {
            return;
        }
        let q_error = target.map(|t| agent.q().sup_distance(&t.q));
        let estimate = match cfg.mode {
            Mode::Discounted => agent.q().max_at(cfg.initial_state),
            Mode::Average => reward_sum / rec.step as f64,
        };
        if let Err(e) = writer.write(rec, cumulative, q_error, estimate, agent.f_value()) {
            write_error = Some(e);
        }
    })?;
    if let Some(e) = write_error {
        return Err(e);
    }
    writer.finish()?;

    let q = &outcome.q;
    let final_f = (cfg.mode == Mode::Average).then(|| cfg.functional.eval(q));
    Ok(ReplicationResult {
        replication: r,
        seed,
        steps: outcome.steps,
        violations: outcome.violations,
        final_error: target.map(|t| q.sup_distance(&t.q)),
        final_f_value: final_f,
        f_error: target.and_then(|t| t.gain).zip(final_f).map(|(v, f)| (f - v).abs()),
        policy_match: target.map(|t| t.policy_matches(q)),
        greedy_support: (0..q.n_states()).map(|s| q.argmax_set(s, TIE_TOLERANCE)).collect(),
        metrics_file: file,
    })
}
