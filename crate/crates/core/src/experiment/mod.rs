//! Experiment harness behind the `peakrl` binary: configuration resolution,
//! seeded learning replications with CSV metrics, and the
//! validate / solve / learn / audit commands.

mod commands;
mod config;
mod records;
mod runner;

pub use commands::{
    audit_battery, audit_instance, solve_instance, validate_instance, AuditBatteryConfig, AuditBatteryReport,
    AuditVerdict, CheckResult, CheckStatus, ExitStatus, SolveReport, ValidationReport,
};
pub use config::{parse_schedule, ExperimentConfig, InstanceSource, LearnFlags, ScheduleChoice, OUT_DIR_ENV};
pub use records::{metrics_header, LogSchedule, MetricsWriter};
pub use runner::{run_experiment, ExperimentSummary, OracleTarget, ReplicationResult};

/// Seed of replication `r` (or battery instance `r`): SplitMix64 applied to
/// `master + r * 0x9E3779B97F4A7C15` (wrapping). Each replication can be
/// rerun alone from the master seed and its index.
pub fn derive_seed(master: u64, r: u64) -> u64 {
    let mut z = master.wrapping_add(r.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Linearly interpolated quantile of unsorted data; `None` when empty.
pub fn quantile(data: &[f64], p: f64) -> Option<f64> {
    if data.is_empty() {
        return None;
    }
    let mut v = data.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = p.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    Some(v[lo] + (v[hi] - v[lo]) * (pos - lo as f64))
}
