//! Sample-level environments and instance generators.
//!
//! Learners interact with a [`ConstrainedEnv`] and only ever see one
//! reward sample, `J` constraint samples and the successor state per step.

mod benchmark;
mod random;
mod search_engine;
mod spec;
mod wireless;

use rand::Rng;

use crate::mdp::MdpInstance;
use crate::SimRng;

pub use benchmark::{benchmark_instance, benchmark_violating_action};
pub use random::{random_instance, FeasibilityMode, RandomParams};
pub use search_engine::{compile_search_engine, SearchEngineEnvSpec};
pub use spec::{load_instance, EnvSpec, RandomSpec};
pub use wireless::{compile_wireless, WirelessEnvSpec};

/// What the agent observes after playing `a` in `s`.
#[derive(Debug, Clone, Copy)]
pub struct Observation<'a> {
    pub reward: f64,
    pub constraints: &'a [f64],
    pub next_state: usize,
}

pub trait ConstrainedEnv {
    fn n_states(&self) -> usize;
    fn n_actions(&self) -> usize;
    fn n_constraints(&self) -> usize;
    fn sample(&mut self, s: usize, a: usize, rng: &mut SimRng) -> Observation<'_>;
}

/// Exact samples from an instance's tables.
#[derive(Debug, Clone, Copy)]
pub struct InstanceEnv<'a> {
    inst: &'a MdpInstance,
}

impl<'a> InstanceEnv<'a> {
    pub fn new(inst: &'a MdpInstance) -> Self {
        InstanceEnv { inst }
    }
}

impl ConstrainedEnv for InstanceEnv<'_> {
    fn n_states(&self) -> usize {
        self.inst.n_states()
    }

    fn n_actions(&self) -> usize {
        self.inst.n_actions()
    }

    fn n_constraints(&self) -> usize {
        self.inst.n_constraints()
    }

    #[inline]
    fn sample(&mut self, s: usize, a: usize, rng: &mut SimRng) -> Observation<'_> {
        let inst = self.inst;
        Observation {
            reward: inst.reward(s, a),
            constraints: inst.constraint_samples(s, a),
            next_state: inst.draw_successor(s, a, rng),
        }
    }
}

/// Adds zero-mean uniform noise in `[-amplitude, amplitude]` to every
/// constraint sample. For robustness experiments only; the convergence
/// results assume exact constraint samples.
#[derive(Debug, Clone)]
pub struct NoisyConstraints<'a> {
    inst: &'a MdpInstance,
    amplitude: f64,
    buf: Vec<f64>,
}

impl<'a> NoisyConstraints<'a> {
    pub fn new(inst: &'a MdpInstance, amplitude: f64) -> Self {
        NoisyConstraints {
            inst,
            amplitude: amplitude.abs(),
            buf: vec![0.0; inst.n_constraints()],
        }
    }
}

impl ConstrainedEnv for NoisyConstraints<'_> {
    fn n_states(&self) -> usize {
        self.inst.n_states()
    }

    fn n_actions(&self) -> usize {
        self.inst.n_actions()
    }

    fn n_constraints(&self) -> usize {
        self.inst.n_constraints()
    }

    fn sample(&mut self, s: usize, a: usize, rng: &mut SimRng) -> Observation<'_> {
        for (out, &g) in self.buf.iter_mut().zip(self.inst.constraint_samples(s, a)) {
            *out = g + self.amplitude * (2.0 * rng.random::<f64>() - 1.0);
        }
        Observation {
            reward: self.inst.reward(s, a),
            constraints: &self.buf,
            next_state: self.inst.draw_successor(s, a, rng),
        }
    }
}
