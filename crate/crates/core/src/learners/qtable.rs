use crate::{Error, Result};

/// Action-value estimates, `[s][a]` row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    n_states: usize,
    n_actions: usize,
    values: Vec<f64>,
}

impl QTable {
    pub fn new(n_states: usize, n_actions: usize, init: f64) -> Self {
        QTable {
            n_states,
            n_actions,
            values: vec![init; n_states * n_actions],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_states = rows.len();
        let n_actions = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_actions) {
            return Err(Error::Argument("Q-table rows differ in length".into()));
        }
        Ok(QTable {
            n_states,
            n_actions,
            values: rows.concat(),
        })
    }

    pub fn from_flat(n_states: usize, n_actions: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n_states * n_actions {
            return Err(Error::Argument(format!(
                "expected {} values, got {}",
                n_states * n_actions,
                values.len()
            )));
        }
        Ok(QTable {
            n_states,
            n_actions,
            values,
        })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    #[inline]
    pub fn get(&self, s: usize, a: usize) -> f64 {
        self.values[s * self.n_actions + a]
    }

    #[inline]
    pub fn set(&mut self, s: usize, a: usize, v: f64) {
        self.values[s * self.n_actions + a] = v;
    }

    #[inline]
    pub fn row(&self, s: usize) -> &[f64] {
        &self.values[s * self.n_actions..(s + 1) * self.n_actions]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn max_at(&self, s: usize) -> f64 {
        self.row(s).iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `max_a Q(s, a)` for every state.
    pub fn state_values(&self) -> Vec<f64> {
        (0..self.n_states).map(|s| self.max_at(s)).collect()
    }

    /// Actions within `tol` of the row maximum.
    pub fn argmax_set(&self, s: usize, tol: f64) -> Vec<usize> {
        let best = self.max_at(s);
        self.row(s)
            .iter()
            .enumerate()
            .filter(|(_, &q)| q >= best - tol)
            .map(|(a, _)| a)
            .collect()
    }

    pub fn sup_distance(&self, other: &QTable) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    /// Adds `r` to every entry.
    pub fn shifted(&self, r: f64) -> QTable {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v += r);
        out
    }

    pub fn scaled(&self, c: f64) -> QTable {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= c);
        out
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n_states).map(|s| self.row(s).to_vec()).collect()
    }
}
