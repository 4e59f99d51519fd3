use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::envs::EnvSpec;
use crate::learners::{AverageSchedule, EpsilonDecay, LearnerConfig, RviFunctional};
use crate::mdp::{MdpInstance, Mode};
use crate::{Error, Result};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "PEAKRL_OUT";

const DEFAULT_OUT_DIR: &str = "peakrl-out";

/// Where the instance comes from: a file path (instance or environment
/// spec) or an inline environment spec with a `type` field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstanceSource {
    Path(PathBuf),
    Spec(EnvSpec),
}

impl InstanceSource {
    pub fn load(&self) -> Result<MdpInstance> {
        match self {
            InstanceSource::Path(p) => crate::envs::load_instance(p),
            InstanceSource::Spec(spec) => spec.compile(),
        }
    }
}

/// Fully resolved configuration of a `learn` run.
///
/// `mode`, `steps` and `seed` are set at the top level; the same fields
/// inside `learner` are overwritten per replication (the seed becomes the
/// derived replication seed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instance: Option<InstanceSource>,
    pub mode: Mode,
    pub learner: LearnerConfig,
    pub replications: usize,
    pub steps: u64,
    pub seed: u64,
    /// Compute the exact solution and log `||Q_k - Q*||`.
    pub oracle: bool,
    /// Solver tolerance of the oracle.
    pub tolerance: f64,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            instance: None,
            mode: Mode::Discounted,
            learner: LearnerConfig::default(),
            replications: 1,
            steps: 100_000,
            seed: 0,
            oracle: true,
            tolerance: 1e-10,
            out_dir: PathBuf::from(DEFAULT_OUT_DIR),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScheduleChoice {
    /// Discounted `alpha = 1/(N+1)^omega`.
    Power(f64),
    Average(AverageSchedule),
}

/// `omega=0.7` / `power:0.7` for the discounted rate, `1/k` / `inv_k` or
/// `1/(k log k)` / `inv_k_log_k` for the average-reward rate.
pub fn parse_schedule(text: &str) -> Result<ScheduleChoice> {
    let t = text.trim();
    match t {
        "1/k" | "inv_k" => return Ok(ScheduleChoice::Average(AverageSchedule::InvK)),
        "1/(k log k)" | "1/(klogk)" | "inv_k_log_k" => {
            return Ok(ScheduleChoice::Average(AverageSchedule::InvKLogK))
        }
        _ => {}
    }
    t.strip_prefix("omega=")
        .or_else(|| t.strip_prefix("power:"))
        .and_then(|w| w.parse::<f64>().ok())
        .map(ScheduleChoice::Power)
        .ok_or_else(|| {
            Error::Argument(format!(
                "unknown schedule '{text}' (expected omega=W, power:W, 1/k, inv_k, inv_k_log_k)"
            ))
        })
}

/// Command-line overrides for a `learn` run. `None` leaves the default (or
/// environment) value in place.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LearnFlags {
    pub instance: Option<PathBuf>,
    pub mode: Option<Mode>,
    pub steps: Option<u64>,
    pub reps: Option<usize>,
    pub seed: Option<u64>,
    pub epsilon_floor: Option<f64>,
    pub schedule: Option<ScheduleChoice>,
    pub functional: Option<RviFunctional>,
    pub out: Option<PathBuf>,
    pub oracle: Option<bool>,
    pub tol: Option<f64>,
}

impl ExperimentConfig {
    /// Resolves a configuration with precedence
    /// config file > flags > `PEAKRL_OUT` > built-in defaults.
    ///
    /// The file is merged key by key, so it only overrides what it names.
    /// Relative instance paths inside the file are taken relative to the
    /// file's directory.
    pub fn resolve(flags: &LearnFlags, file: Option<&Path>, env_out: Option<&str>) -> Result<Self> {
        let mut base = ExperimentConfig::default();
        if let Some(dir) = env_out.filter(|d| !d.is_empty()) {
            base.out_dir = PathBuf::from(dir);
        }
        base.apply_flags(flags);
        let mut cfg = match file {
            None => base,
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                let overlay: Value = serde_json::from_str(&text)?;
                if !overlay.is_object() {
                    return Err(Error::Config("config file must hold a JSON object".into()));
                }
                let mut merged = serde_json::to_value(&base)?;
                merge(&mut merged, overlay);
                let mut cfg: ExperimentConfig = serde_json::from_value(merged)
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                if let Some(InstanceSource::Path(p)) = &mut cfg.instance {
                    if p.is_relative() && flags.instance.as_ref() != Some(p) {
                        if let Some(dir) = path.parent() {
                            *p = dir.join(&*p);
                        }
                    }
                }
                cfg
            }
        };
        cfg.sync_learner();
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply_flags(&mut self, flags: &LearnFlags) {
        if let Some(p) = &flags.instance {
            self.instance = Some(InstanceSource::Path(p.clone()));
        }
        if let Some(m) = flags.mode {
            self.mode = m;
        }
        if let Some(n) = flags.steps {
            self.steps = n;
        }
        if let Some(r) = flags.reps {
            self.replications = r;
        }
        if let Some(s) = flags.seed {
            self.seed = s;
        }
        if let Some(floor) = flags.epsilon_floor {
            let ex = &mut self.learner.exploration;
            ex.epsilon_floor = floor;
            if ex.decay == EpsilonDecay::Constant {
                ex.epsilon_start = floor;
            }
        }
        match flags.schedule {
            Some(ScheduleChoice::Power(w)) => self.learner.discounted_schedule.omega = w,
            Some(ScheduleChoice::Average(s)) => self.learner.average_schedule = s,
            None => {}
        }
        if let Some(f) = flags.functional {
            self.learner.functional = f;
        }
        if let Some(o) = &flags.out {
            self.out_dir = o.clone();
        }
        if let Some(o) = flags.oracle {
            self.oracle = o;
        }
        if let Some(t) = flags.tol {
            self.tolerance = t;
        }
    }

    fn sync_learner(&mut self) {
        self.learner.mode = self.mode;
        self.learner.steps = self.steps;
        self.learner.seed = self.seed;
    }

    pub fn validate(&self) -> Result<()> {
        if self.instance.is_none() {
            return Err(Error::Config("no instance given (config `instance` or --instance)".into()));
        }
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::Config(format!("tolerance must be positive (got {})", self.tolerance)));
        }
        Ok(())
    }
}

/// Deep merge of JSON objects; anything else in `overlay` replaces `base`.
fn merge(base: &mut Value, overlay: Value) {
    match (base, overlay) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
        let p = dir.join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn precedence_file_over_flags_over_env() {
        let dir = tempfile::tempdir().unwrap();
        let flags = LearnFlags {
            instance: Some("inst.json".into()),
            steps: Some(500),
            reps: Some(3),
            out: None,
            ..LearnFlags::default()
        };
        let cfg = ExperimentConfig::resolve(&flags, None, Some("/tmp/envout")).unwrap();
        assert_eq!(cfg.out_dir, PathBuf::from("/tmp/envout"));
        assert_eq!((cfg.steps, cfg.replications), (500, 3));

        let file = write(dir.path(), "cfg.json", r#"{"steps": 50, "learner": {"q_init": 1.5}}"#);
        let cfg = ExperimentConfig::resolve(&flags, Some(&file), None).unwrap();
        assert_eq!(cfg.steps, 50);
        assert_eq!(cfg.learner.steps, 50);
        assert_eq!(cfg.replications, 3);
        assert_eq!(cfg.learner.q_init, 1.5);
        assert_eq!(cfg.out_dir, PathBuf::from(DEFAULT_OUT_DIR));
    }

    #[test]
    fn relative_paths_follow_the_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let file = write(dir.path(), "cfg.json", r#"{"instance": "inst.json"}"#);
        let cfg = ExperimentConfig::resolve(&LearnFlags::default(), Some(&file), None).unwrap();
        assert_eq!(cfg.instance, Some(InstanceSource::Path(dir.path().join("inst.json"))));
    }

    #[test]
    fn config_errors() {
        let dir = tempfile::tempdir().unwrap();
        let flags = LearnFlags {
            instance: Some("x.json".into()),
            ..LearnFlags::default()
        };
        let zero = write(dir.path(), "zero.json", r#"{"replications": 0}"#);
        assert!(matches!(ExperimentConfig::resolve(&flags, Some(&zero), None), Err(Error::Config(_))));
        let typo = write(dir.path(), "typo.json", r#"{"replicatons": 2}"#);
        assert!(matches!(ExperimentConfig::resolve(&flags, Some(&typo), None), Err(Error::Config(_))));
        assert!(matches!(
            ExperimentConfig::resolve(&LearnFlags::default(), None, None),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn inline_spec_and_flags() {
        let dir = tempfile::tempdir().unwrap();
        let file = write(
            dir.path(),
            "cfg.json",
            r#"{"instance": {"type": "random", "n_states": 3, "n_actions": 2, "n_constraints": 1,
                "gamma": 0.9, "feasibility": "guaranteed_feasible"}}"#,
        );
        let flags = LearnFlags {
            epsilon_floor: Some(0.2),
            schedule: Some(parse_schedule("omega=0.8").unwrap()),
            functional: Some("mean".parse().unwrap()),
            ..LearnFlags::default()
        };
        let cfg = ExperimentConfig::resolve(&flags, Some(&file), None).unwrap();
        assert_eq!(cfg.instance.unwrap().load().unwrap().n_states(), 3);
        assert_eq!(cfg.learner.exploration.epsilon(10), 0.2);
        assert_eq!(cfg.learner.discounted_schedule.omega, 0.8);
        assert_eq!(cfg.learner.functional, RviFunctional::MeanOfTable);
    }

    #[test]
    fn schedule_names() {
        assert_eq!(parse_schedule("1/k").unwrap(), ScheduleChoice::Average(AverageSchedule::InvK));
        assert_eq!(
            parse_schedule("inv_k_log_k").unwrap(),
            ScheduleChoice::Average(AverageSchedule::InvKLogK)
        );
        assert_eq!(parse_schedule("power:0.6").unwrap(), ScheduleChoice::Power(0.6));
        assert!(parse_schedule("1/sqrt(k)").is_err());
    }
}
