use serde::{Deserialize, Serialize};

use super::{
    q_update_discounted, rvi_update_average, AverageSchedule, DiscountedSchedule,
    ExplorationPolicy, QTable, RviFunctional, TableFunctional, TIE_TOLERANCE,
};
use crate::envs::{ConstrainedEnv, InstanceEnv};
use crate::mdp::{check_unichain, find_recurrent_state, MdpInstance, Mode, SimulationState, VisitCounter};
use crate::transform::{transform_sample, ClipBound};
use crate::{seeded_rng, Error, Result, SimRng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearnerConfig {
    pub mode: Mode,
    pub discounted_schedule: DiscountedSchedule,
    pub average_schedule: AverageSchedule,
    pub exploration: ExplorationPolicy,
    /// Constant every Q entry starts from.
    pub q_init: f64,
    /// Normalizing functional (average mode only).
    pub functional: RviFunctional,
    pub steps: u64,
    pub seed: u64,
    pub initial_state: usize,
    pub tie_tolerance: f64,
    /// Skip the unichain / recurrent-state / positive-reward pre-checks.
    pub waive_assumption_checks: bool,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        LearnerConfig {
            mode: Mode::Discounted,
            discounted_schedule: DiscountedSchedule::default(),
            average_schedule: AverageSchedule::default(),
            exploration: ExplorationPolicy::default(),
            q_init: 0.0,
            functional: RviFunctional::default(),
            steps: 100_000,
            seed: 0,
            initial_state: 0,
            tie_tolerance: TIE_TOLERANCE,
            waive_assumption_checks: false,
        }
    }
}

impl LearnerConfig {
    pub fn discounted() -> Self {
        LearnerConfig::default()
    }

    pub fn average() -> Self {
        LearnerConfig {
            mode: Mode::Average,
            ..LearnerConfig::default()
        }
    }

    /// Checks the configuration against an instance without running the
    /// (possibly expensive) assumption checks.
    pub fn check_against(&self, inst: &MdpInstance) -> Result<()> {
        match (self.mode, inst.gamma()) {
            (Mode::Discounted, None) => {
                return Err(Error::Config("discounted mode needs an instance with gamma".into()))
            }
            (Mode::Average, Some(g)) => {
                return Err(Error::Config(format!(
                    "average mode got an instance with gamma = {g}; drop gamma for average-reward runs"
                )))
            }
            _ => {}
        }
        if self.mode == Mode::Discounted {
            self.discounted_schedule.validate()?;
        }
        self.exploration.validate()?;
        if self.initial_state >= inst.n_states() {
            return Err(Error::Config(format!(
                "initial_state {} out of range",
                self.initial_state
            )));
        }
        if let RviFunctional::ReferenceEntry { state, action } = self.functional {
            if state >= inst.n_states() || action >= inst.n_actions() {
                return Err(Error::Config(format!(
                    "reference entry ({state}, {action}) out of range"
                )));
            }
        }
        if !self.q_init.is_finite() || !(self.tie_tolerance >= 0.0) {
            return Err(Error::Config("q_init must be finite and tie_tolerance >= 0".into()));
        }
        Ok(())
    }

    fn check_assumptions(&self, inst: &MdpInstance) -> Result<()> {
        if !inst.has_positive_rewards() {
            return Err(Error::Validation(
                "rewards must be strictly positive; apply shift_reward first".into(),
            ));
        }
        match self.mode {
            Mode::Discounted => {
                let report = check_unichain(inst)?;
                if !report.unichain {
                    return Err(Error::Validation(format!(
                        "instance is not unichain (policy {:?})",
                        report.violating_policy.unwrap_or_default()
                    )));
                }
            }
            Mode::Average => {
                if find_recurrent_state(inst)?.is_none() {
                    return Err(Error::Validation(
                        "no state is recurrent under every stationary policy".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// One learner step, borrowed from the environment's sample buffer.
#[derive(Debug, Clone, Copy)]
pub struct StepRecord<'a> {
    /// Number of updates performed so far, including this one.
    pub step: u64,
    pub state: usize,
    pub action: usize,
    pub next_state: usize,
    pub raw_reward: f64,
    pub clipped_reward: f64,
    pub constraint_samples: &'a [f64],
}

impl StepRecord<'_> {
    pub fn violated(&self, j: usize) -> bool {
        self.constraint_samples[j] < 0.0
    }

    pub fn any_violation(&self) -> bool {
        self.constraint_samples.iter().any(|&g| g < 0.0)
    }

    /// One character per constraint: `1` if violated at this step.
    pub fn violation_mask(&self) -> String {
        self.constraint_samples
            .iter()
            .map(|&g| if g < 0.0 { '1' } else { '0' })
            .collect()
    }
}

/// Size of a learner's persistent numeric state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Footprint {
    pub q_entries: usize,
    pub counter_entries: usize,
    /// Heap bytes held by the Q-table and visit counter.
    pub table_bytes: usize,
    /// Bytes of the learner struct itself (schedules, RNG, scalars).
    pub inline_bytes: usize,
}

/// Discounted Q-learning or RVI Q-learning on clipped reward samples.
///
/// Holds one Q-table, one visit counter, a few scalars and the random
/// stream; nothing grows with the number of constraints.
#[derive(Debug, Clone)]
pub struct Learner {
    mode: Mode,
    gamma: f64,
    bound: ClipBound,
    discounted_schedule: DiscountedSchedule,
    average_schedule: AverageSchedule,
    exploration: ExplorationPolicy,
    functional: RviFunctional,
    tie_tolerance: f64,
    q: QTable,
    visits: VisitCounter,
    sim: SimulationState,
    rng: SimRng,
}

impl Learner {
    pub fn new(inst: &MdpInstance, config: &LearnerConfig) -> Result<Self> {
        config.check_against(inst)?;
        if !config.waive_assumption_checks {
            config.check_assumptions(inst)?;
        }
        let bound = ClipBound::for_instance(inst, config.mode)?;
        Ok(Learner {
            mode: config.mode,
            gamma: inst.gamma().unwrap_or(1.0),
            bound,
            discounted_schedule: config.discounted_schedule,
            average_schedule: config.average_schedule,
            exploration: config.exploration,
            functional: config.functional,
            tie_tolerance: config.tie_tolerance,
            q: QTable::new(inst.n_states(), inst.n_actions(), config.q_init),
            visits: VisitCounter::new(inst.n_states(), inst.n_actions()),
            sim: SimulationState {
                current_state: config.initial_state,
                rng_seed: config.seed,
                step: 0,
            },
            rng: seeded_rng(config.seed),
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn q(&self) -> &QTable {
        &self.q
    }

    pub fn visits(&self) -> &VisitCounter {
        &self.visits
    }

    pub fn simulation(&self) -> &SimulationState {
        &self.sim
    }

    pub fn clip_bound(&self) -> ClipBound {
        self.bound
    }

    pub fn functional(&self) -> RviFunctional {
        self.functional
    }

    /// Current value of the normalizing functional.
    pub fn f_value(&self) -> f64 {
        self.functional.eval(&self.q)
    }

    pub fn footprint(&self) -> Footprint {
        Footprint {
            q_entries: self.q.values().len(),
            counter_entries: self.visits.len(),
            table_bytes: std::mem::size_of_val(self.q.values()) + self.visits.len() * std::mem::size_of::<u64>(),
            inline_bytes: std::mem::size_of::<Self>(),
        }
    }

    /// Observes one transition from `env`, transforms the reward sample and
    /// applies the mode's update to the visited pair only.
    pub fn step<'e, E: ConstrainedEnv + ?Sized>(&mut self, env: &'e mut E) -> Result<StepRecord<'e>> {
        let s = self.sim.current_state;
        let a = self
            .exploration
            .choose(self.q.row(s), self.sim.step, self.tie_tolerance, &mut self.rng);
        let obs = env.sample(s, a, &mut self.rng);
        let clipped = transform_sample(obs.reward, obs.constraints, &self.bound);
        let n = self.visits.record(s, a);
        match self.mode {
            Mode::Discounted => {
                let alpha = self.discounted_schedule.rate(n);
                q_update_discounted(&mut self.q, s, a, clipped, obs.next_state, self.gamma, alpha)?;
            }
            Mode::Average => {
                let beta = self.average_schedule.rate(n);
                rvi_update_average(&mut self.q, s, a, clipped, obs.next_state, beta, &self.functional)?;
            }
        }
        self.sim.step += 1;
        self.sim.current_state = obs.next_state;
        Ok(StepRecord {
            step: self.sim.step,
            state: s,
            action: a,
            next_state: obs.next_state,
            raw_reward: obs.reward,
            clipped_reward: clipped,
            constraint_samples: obs.constraints,
        })
    }

    pub fn into_parts(self) -> (QTable, VisitCounter) {
        (self.q, self.visits)
    }
}

#[derive(Debug, Clone)]
pub struct LearnOutcome {
    pub q: QTable,
    pub visits: VisitCounter,
    pub steps: u64,
    pub violations: u64,
}

/// Runs `config.steps` learner steps on the instance, calling `observer`
/// after every step.
pub fn run_learning<F>(inst: &MdpInstance, config: &LearnerConfig, mut observer: F) -> Result<LearnOutcome>
where
    F: FnMut(&StepRecord<'_>, &Learner),
{
    let mut learner = Learner::new(inst, config)?;
    let mut env = InstanceEnv::new(inst);
    let mut violations = 0;
    for _ in 0..config.steps {
        let record = learner.step(&mut env)?;
        violations += u64::from(record.any_violation());
        observer(&record, &learner);
    }
    let steps = learner.simulation().step;
    let (q, visits) = learner.into_parts();
    Ok(LearnOutcome {
        q,
        visits,
        steps,
        violations,
    })
}
