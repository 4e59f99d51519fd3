use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Row-stochastic `|S| x |A|` matrix of action probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StochasticPolicy {
    n_states: usize,
    n_actions: usize,
    probs: Vec<f64>,
}

impl StochasticPolicy {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_states = rows.len();
        let n_actions = rows.first().map_or(0, Vec::len);
        let mut probs = Vec::with_capacity(n_states * n_actions);
        for (s, row) in rows.iter().enumerate() {
            if row.len() != n_actions {
                return Err(Error::Validation(format!("policy row {s} has wrong length")));
            }
            if row.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
                return Err(Error::Validation(format!("policy row {s} has a negative entry")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::Validation(format!("policy row {s} sums to {sum}")));
            }
            probs.extend_from_slice(row);
        }
        Ok(StochasticPolicy {
            n_states,
            n_actions,
            probs,
        })
    }

    /// Point masses on the given actions.
    pub fn deterministic(actions: &[usize], n_actions: usize) -> Self {
        let mut probs = vec![0.0; actions.len() * n_actions];
        for (s, &a) in actions.iter().enumerate() {
            probs[s * n_actions + a] = 1.0;
        }
        StochasticPolicy {
            n_states: actions.len(),
            n_actions,
            probs,
        }
    }

    /// Uniform distribution over each state's action set. Sets must be
    /// nonempty.
    pub fn uniform_over(sets: &[Vec<usize>], n_actions: usize) -> Self {
        let mut probs = vec![0.0; sets.len() * n_actions];
        for (s, set) in sets.iter().enumerate() {
            let w = 1.0 / set.len() as f64;
            for &a in set {
                probs[s * n_actions + a] = w;
            }
        }
        StochasticPolicy {
            n_states: sets.len(),
            n_actions,
            probs,
        }
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn row(&self, s: usize) -> &[f64] {
        &self.probs[s * self.n_actions..(s + 1) * self.n_actions]
    }

    pub fn prob(&self, s: usize, a: usize) -> f64 {
        self.probs[s * self.n_actions + a]
    }

    /// Actions with positive probability in state `s`.
    pub fn support(&self, s: usize) -> Vec<usize> {
        self.row(s)
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(a, _)| a)
            .collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n_states).map(|s| self.row(s).to_vec()).collect()
    }
}

/// Per-pair visit counts `N(t, s, a)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisitCounter {
    n_actions: usize,
    counts: Vec<u64>,
    total_steps: u64,
}

impl VisitCounter {
    pub fn new(n_states: usize, n_actions: usize) -> Self {
        VisitCounter {
            n_actions,
            counts: vec![0; n_states * n_actions],
            total_steps: 0,
        }
    }

    /// Records a visit and returns the updated count for the pair.
    #[inline]
    pub fn record(&mut self, s: usize, a: usize) -> u64 {
        let c = &mut self.counts[s * self.n_actions + a];
        *c += 1;
        self.total_steps += 1;
        *c
    }

    pub fn count(&self, s: usize, a: usize) -> u64 {
        self.counts[s * self.n_actions + a]
    }

    pub fn total_steps(&self) -> u64 {
        self.total_steps
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Smallest empirical visit frequency `min N(t,s,a) / t`.
    pub fn min_frequency(&self) -> f64 {
        if self.total_steps == 0 {
            return 0.0;
        }
        let min = self.counts.iter().copied().min().unwrap_or(0);
        min as f64 / self.total_steps as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulationState {
    pub current_state: usize,
    pub rng_seed: u64,
    pub step: u64,
}

/// Enumerates deterministic policies drawn from per-state action sets, in
/// mixed-radix order (state 0 varies fastest).
#[derive(Debug, Clone)]
pub struct DeterministicPolicies {
    sets: Vec<Vec<usize>>,
    digits: Vec<usize>,
    current: Vec<usize>,
    started: bool,
    done: bool,
}

impl DeterministicPolicies {
    /// Fails when the number of policies exceeds `limit` or a set is empty.
    pub fn new(sets: Vec<Vec<usize>>, limit: u64) -> Result<Self> {
        let mut total: u64 = 1;
        for (s, set) in sets.iter().enumerate() {
            if set.is_empty() {
                return Err(Error::Infeasible(format!("state {s} has no admissible action")));
            }
            total = total.saturating_mul(set.len() as u64);
        }
        if total > limit {
            return Err(Error::Capability(format!(
                "{total} deterministic policies exceed the enumeration limit {limit}; \
                 use a sampling-based spot check instead"
            )));
        }
        let current = sets.iter().map(|set| set[0]).collect();
        Ok(DeterministicPolicies {
            digits: vec![0; sets.len()],
            sets,
            current,
            started: false,
            done: false,
        })
    }

    pub fn full(n_states: usize, n_actions: usize, limit: u64) -> Result<Self> {
        Self::new(vec![(0..n_actions).collect(); n_states], limit)
    }

    /// Advances to the next policy; returns `None` once exhausted.
    pub fn next_policy(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.current);
        }
        for s in 0..self.sets.len() {
            self.digits[s] += 1;
            if self.digits[s] < self.sets[s].len() {
                self.current[s] = self.sets[s][self.digits[s]];
                return Some(&self.current);
            }
            self.digits[s] = 0;
            self.current[s] = self.sets[s][0];
        }
        self.done = true;
        None
    }
}
