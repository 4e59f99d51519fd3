//! Power control under a per-step QoS floor: solve the clipped problem and
//! report the minimum average power it implies.

use peakrl::envs::{compile_wireless, WirelessEnvSpec};
use peakrl::prelude::*;

fn main() -> Result<()> {
    let spec: WirelessEnvSpec = serde_json::from_value(serde_json::json!({
        "n_channel_states": 2,
        "n_bandwidth_actions": 3,
        "power": [[0.2, 0.6, 1.0], [0.5, 0.9, 1.5]],
        "qos": [[0.6, 0.9, 1.0], [0.3, 0.6, 0.95]],
        "qos_floor": 0.55,
        "kernel": [
            [[0.8, 0.2], [0.8, 0.2], [0.8, 0.2]],
            [[0.3, 0.7], [0.3, 0.7], [0.3, 0.7]]
        ]
    }))?;
    let inst = compile_wireless(&spec)?;
    println!("reward shift {:.3}, new bound c = {:.3}", inst.reward_shift(), inst.bound_c());
    println!("feasible bandwidths per channel {:?}", restricted_action_sets(&inst));

    let sol = transformed_relative_value_iteration(&inst, 1e-12)?;
    for s in 0..inst.n_states() {
        println!("channel {s}: Q* = {:?} -> pick {:?}", sol.q.row(s), sol.q.argmax_set(s, 1e-9));
    }
    println!("minimum average power {:.6} W", inst.reward_shift() - sol.gain());

    let unconstrained: Vec<usize> = (0..inst.n_states())
        .map(|s| (0..inst.n_actions()).max_by(|&a, &b| inst.reward(s, a).total_cmp(&inst.reward(s, b))).unwrap())
        .collect();
    println!("ignoring QoS would pick {unconstrained:?}");
    Ok(())
}
