//! Step-size conditions for RVI Q-learning on a few rate families.

use peakrl::learners::{validate_schedule, ScheduleFamily};

fn main() -> peakrl::Result<()> {
    let families = [
        ScheduleFamily::InverseK,
        ScheduleFamily::InverseKLogK,
        ScheduleFamily::InversePower { omega: 0.7 },
        ScheduleFamily::InversePower { omega: 0.4 },
        ScheduleFamily::InversePower { omega: 1.5 },
    ];
    for family in &families {
        let report = validate_schedule(family, 1_000_000)?;
        println!("{:<14} passes={} max_ratio={:.3}", report.family, report.passes, report.max_ratio);
        for c in report.conditions.iter().filter(|c| !c.holds) {
            println!("    condition {}: {}", c.condition, c.reason);
        }
    }
    Ok(())
}
