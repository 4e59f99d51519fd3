use std::path::Path;

use serde::{Deserialize, Serialize};

use super::MdpInstance;
use crate::{Error, Result};

/// On-disk representation of an instance (JSON).
///
/// `constraints` is a list of `J` tables, each indexed `[s][a]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MdpFile {
    pub n_states: usize,
    pub n_actions: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    pub bound_c: f64,
    pub kernel: Vec<Vec<Vec<f64>>>,
    pub reward: Vec<Vec<f64>>,
    #[serde(default)]
    pub constraints: Vec<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recurrent_state: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reward_shift: Option<f64>,
}

impl MdpFile {
    pub fn into_instance(self) -> Result<MdpInstance> {
        let (ns, na) = (self.n_states, self.n_actions);
        if self.kernel.len() != ns {
            return Err(Error::Validation(format!(
                "kernel has {} state rows, expected {ns}",
                self.kernel.len()
            )));
        }
        let mut kernel = Vec::with_capacity(ns * na * ns);
        for (s, per_state) in self.kernel.iter().enumerate() {
            if per_state.len() != na {
                return Err(Error::Validation(format!(
                    "kernel[{s}] has {} action rows, expected {na}",
                    per_state.len()
                )));
            }
            for (a, row) in per_state.iter().enumerate() {
                if row.len() != ns {
                    return Err(Error::Validation(format!(
                        "kernel[{s}][{a}] has {} entries, expected {ns}",
                        row.len()
                    )));
                }
                kernel.extend_from_slice(row);
            }
        }
        let reward = flatten_table("reward", &self.reward, ns, na)?;
        let nj = self.constraints.len();
        let mut tables = Vec::with_capacity(nj);
        for (j, table) in self.constraints.iter().enumerate() {
            tables.push(flatten_table(&format!("constraints[{j}]"), table, ns, na)?);
        }
        let mut constraints = vec![0.0; ns * na * nj];
        for (j, table) in tables.iter().enumerate() {
            for (sa, &g) in table.iter().enumerate() {
                constraints[sa * nj + j] = g;
            }
        }
        MdpInstance::from_flat(
            ns,
            na,
            nj,
            kernel,
            reward,
            constraints,
            self.gamma,
            self.bound_c,
            self.recurrent_state,
            self.reward_shift.unwrap_or(0.0),
        )
    }

    pub fn from_instance(inst: &MdpInstance) -> Self {
        let (ns, na, nj) = (inst.n_states(), inst.n_actions(), inst.n_constraints());
        MdpFile {
            n_states: ns,
            n_actions: na,
            gamma: inst.gamma(),
            bound_c: inst.bound_c(),
            kernel: (0..ns)
                .map(|s| (0..na).map(|a| inst.kernel_row(s, a).to_vec()).collect())
                .collect(),
            reward: (0..ns)
                .map(|s| (0..na).map(|a| inst.reward(s, a)).collect())
                .collect(),
            constraints: (0..nj)
                .map(|j| {
                    (0..ns)
                        .map(|s| (0..na).map(|a| inst.constraint(j, s, a)).collect())
                        .collect()
                })
                .collect(),
            recurrent_state: inst.recurrent_state(),
            reward_shift: (inst.reward_shift() != 0.0).then_some(inst.reward_shift()),
        }
    }
}

fn flatten_table(name: &str, table: &[Vec<f64>], ns: usize, na: usize) -> Result<Vec<f64>> {
    if table.len() != ns {
        return Err(Error::Validation(format!(
            "{name} has {} rows, expected {ns}",
            table.len()
        )));
    }
    let mut out = Vec::with_capacity(ns * na);
    for (s, row) in table.iter().enumerate() {
        if row.len() != na {
            return Err(Error::Validation(format!(
                "{name}[{s}] has {} entries, expected {na}",
                row.len()
            )));
        }
        out.extend_from_slice(row);
    }
    Ok(out)
}

impl MdpInstance {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<MdpFile>(text)?.into_instance()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&MdpFile::from_instance(self)).expect("instance serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
