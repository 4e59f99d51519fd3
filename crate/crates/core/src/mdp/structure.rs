use std::collections::VecDeque;

use serde::Serialize;

use super::{DeterministicPolicies, MdpInstance};
use crate::Result;

/// Largest number of deterministic policies the structural checks and the
/// brute-force oracle will enumerate.
pub const ENUMERATION_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnichainReport {
    pub unichain: bool,
    pub policies_checked: u64,
    /// A deterministic policy whose induced chain is not irreducible.
    pub violating_policy: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecurrenceReport {
    pub state: usize,
    pub recurrent: bool,
    pub policies_checked: u64,
    pub violating_policy: Option<Vec<usize>>,
    /// A state from which `state` cannot be reached under the violating policy.
    pub stranded_state: Option<usize>,
}

/// Successor lists of the chain induced by a deterministic policy
/// (edges where the kernel probability is positive).
fn successors(inst: &MdpInstance, policy: &[usize]) -> Vec<Vec<usize>> {
    policy
        .iter()
        .enumerate()
        .map(|(s, &a)| {
            inst.kernel_row(s, a)
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0.0)
                .map(|(sp, _)| sp)
                .collect()
        })
        .collect()
}

fn bfs(adj: &[Vec<usize>], start: usize) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen
}

fn reverse(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut rev = vec![Vec::new(); adj.len()];
    for (u, vs) in adj.iter().enumerate() {
        for &v in vs {
            rev[v].push(u);
        }
    }
    rev
}

/// States reachable from `start` when each state `s` may use any action in
/// `support[s]`.
pub fn reachable_from(inst: &MdpInstance, support: &[Vec<usize>], start: usize) -> Vec<bool> {
    let adj: Vec<Vec<usize>> = support
        .iter()
        .enumerate()
        .map(|(s, actions)| {
            let mut next: Vec<usize> = actions
                .iter()
                .flat_map(|&a| {
                    inst.kernel_row(s, a)
                        .iter()
                        .enumerate()
                        .filter(|(_, &p)| p > 0.0)
                        .map(|(sp, _)| sp)
                })
                .collect();
            next.sort_unstable();
            next.dedup();
            next
        })
        .collect();
    bfs(&adj, start)
}

/// Checks that every deterministic stationary policy induces an irreducible
/// chain (state 0 reaches every state and every state reaches state 0).
///
/// Randomized policies need no separate check: their support graphs are
/// unions of deterministic ones, and adding edges preserves irreducibility.
pub fn check_unichain(inst: &MdpInstance) -> Result<UnichainReport> {
    let mut policies = DeterministicPolicies::full(inst.n_states(), inst.n_actions(), ENUMERATION_LIMIT)?;
    let mut checked = 0;
    while let Some(policy) = policies.next_policy() {
        checked += 1;
        let adj = successors(inst, policy);
        let forward = bfs(&adj, 0);
        let backward = bfs(&reverse(&adj), 0);
        if forward.iter().chain(&backward).any(|&b| !b) {
            return Ok(UnichainReport {
                unichain: false,
                policies_checked: checked,
                violating_policy: Some(policy.to_vec()),
            });
        }
    }
    Ok(UnichainReport {
        unichain: true,
        policies_checked: checked,
        violating_policy: None,
    })
}

/// Checks that `s_star` is reachable from every state under every
/// deterministic stationary policy, which makes it recurrent for all of them
/// on a finite chain.
pub fn check_recurrent_state(inst: &MdpInstance, s_star: usize) -> Result<RecurrenceReport> {
    inst.check_state(s_star)?;
    let mut policies = DeterministicPolicies::full(inst.n_states(), inst.n_actions(), ENUMERATION_LIMIT)?;
    let mut checked = 0;
    while let Some(policy) = policies.next_policy() {
        checked += 1;
        let reaches = bfs(&reverse(&successors(inst, policy)), s_star);
        if let Some(stranded) = reaches.iter().position(|&b| !b) {
            return Ok(RecurrenceReport {
                state: s_star,
                recurrent: false,
                policies_checked: checked,
                violating_policy: Some(policy.to_vec()),
                stranded_state: Some(stranded),
            });
        }
    }
    Ok(RecurrenceReport {
        state: s_star,
        recurrent: true,
        policies_checked: checked,
        violating_policy: None,
        stranded_state: None,
    })
}

/// The declared recurrent state if it passes, otherwise the first state that
/// does.
pub fn find_recurrent_state(inst: &MdpInstance) -> Result<Option<usize>> {
    let candidates = inst
        .recurrent_state()
        .into_iter()
        .chain((0..inst.n_states()).filter(|&s| Some(s) != inst.recurrent_state()));
    for s in candidates {
        if check_recurrent_state(inst, s)?.recurrent {
            return Ok(Some(s));
        }
    }
    Ok(None)
}
