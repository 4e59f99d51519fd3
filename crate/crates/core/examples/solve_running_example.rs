//! One state, two actions, one constraint that only the first action meets.
//! The clipped problem has Q* = [2, 0]: the feasible action wins outright.

use peakrl::prelude::*;
use peakrl::oracle::{default_feasibility_tolerance, equivalence_audit};

fn main() -> Result<()> {
    let inst = MdpInstance::new(
        vec![vec![vec![1.0], vec![1.0]]],
        vec![vec![1.0, 1.0]],
        vec![vec![vec![0.2, -0.1]]],
        Some(0.5),
        1.0,
    )?;
    let bound = ClipBound::for_instance(&inst, Mode::Discounted)?;
    println!("clip value -B = {}", -bound.value());

    let (q, v) = transformed_value_iteration(&inst, &bound, 1e-12)?;
    println!("Q* = {:?}, V* = {:?}", q.row(0), v.values);

    let verdict = feasibility_check(&q, None, default_feasibility_tolerance(inst.bound_c()));
    println!("feasibility {:?}, margin {:.3}", verdict.status, verdict.margin);

    let (constrained, policy) = constrained_value_iteration(&inst, 1e-12)?;
    println!("constrained optimum {:?} with policy {:?}", constrained.values, policy.rows());

    let audit = equivalence_audit(&inst, Mode::Discounted, 1e-9)?;
    println!("audit passed: {}", audit.passed);
    Ok(())
}
