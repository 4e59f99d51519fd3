use crate::mdp::MdpInstance;
use crate::Result;

const N_STATES: usize = 5;
const N_ACTIONS: usize = 3;

/// Rewards of the benchmark; the violating action of state `s` is
/// `(s + 2) % 3` and carries the largest reward in its row.
const REWARD: [[f64; N_ACTIONS]; N_STATES] = [
    [0.80, 0.50, 0.95],
    [0.90, 0.70, 0.40],
    [0.30, 0.95, 0.60],
    [0.50, 0.75, 1.00],
    [0.95, 0.35, 0.65],
];

/// Index of the one constraint-violating action in state `s`.
pub fn benchmark_violating_action(s: usize) -> usize {
    (s + 2) % N_ACTIONS
}

/// Fixed 5-state, 3-action instance with exactly one violating action per
/// state, each the most tempting by immediate reward.
///
/// Every action moves to `(s + a + 1) % 5` with probability 0.6 and
/// uniformly otherwise, so all chains mix fast and every state is
/// recurrent. The violating action of state `s` breaks constraint
/// `s % J`; all other constraint values are positive. Kernel and rewards do
/// not depend on `J`.
pub fn benchmark_instance(n_constraints: usize, gamma: Option<f64>) -> Result<MdpInstance> {
    let kernel = (0..N_STATES)
        .map(|s| {
            (0..N_ACTIONS)
                .map(|a| {
                    let mut row = vec![0.4 / N_STATES as f64; N_STATES];
                    row[(s + a + 1) % N_STATES] += 0.6;
                    row
                })
                .collect()
        })
        .collect();
    let reward = REWARD.iter().map(|r| r.to_vec()).collect();
    let constraints = (0..n_constraints)
        .map(|j| {
            (0..N_STATES)
                .map(|s| {
                    (0..N_ACTIONS)
                        .map(|a| {
                            if a == benchmark_violating_action(s) && s % n_constraints == j {
                                -0.5
                            } else {
                                0.1 + 0.1 * ((s + a + j) % 4) as f64
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    MdpInstance::new(kernel, reward, constraints, gamma, 1.0)
}
