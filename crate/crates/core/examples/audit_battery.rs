//! Equivalence audit over random feasible instances in both modes.
//!
//! cargo run --release --example audit_battery [COUNT]

use peakrl::experiment::{audit_battery, AuditBatteryConfig};
use peakrl::mdp::Mode;

fn main() -> peakrl::Result<()> {
    let count = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(50);
    for mode in [Mode::Discounted, Mode::Average] {
        let config = AuditBatteryConfig { count, mode, seed: 1, ..AuditBatteryConfig::default() };
        let report = audit_battery(&config)?;
        let worst = report.verdicts.iter().map(|v| v.max_value_gap).fold(0.0, f64::max);
        println!("{mode}: {}/{} passed, worst value gap {worst:.2e}", report.passed, report.total);
        for v in report.verdicts.iter().filter(|v| !v.passed) {
            println!("  instance {} (seed {:#x}): {:?}", v.index, v.seed, v.counterexamples);
        }
    }
    Ok(())
}
