use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use peakrl::envs::load_instance;
use peakrl::experiment::{
    audit_battery, audit_instance, parse_schedule, run_experiment, solve_instance, validate_instance,
    AuditBatteryConfig, ExitStatus, ExperimentConfig, LearnFlags, ScheduleChoice, OUT_DIR_ENV,
};
use peakrl::learners::RviFunctional;
use peakrl::mdp::Mode;
use peakrl::{Error, Result};

/// Peak-constrained tabular RL: validate instances, solve them exactly,
/// run learners, audit the reward transform.
///
/// Exit status: 0 success, 2 validation failure, 3 infeasible, 4 runtime error.
#[derive(Parser)]
#[command(name = "peakrl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an instance file against the structural assumptions.
    Validate { instance: PathBuf },
    /// Solve the transformed problem exactly and write solution.json.
    Solve {
        instance: PathBuf,
        /// Defaults to discounted when the instance has gamma, else average.
        #[arg(long)]
        mode: Option<Mode>,
        /// Value tolerance of the equivalence audit.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run seeded learning replications and write CSV metrics.
    ///
    /// Precedence: config file > flags > PEAKRL_OUT > defaults.
    Learn(LearnArgs),
    /// Run the equivalence audit on one instance or a random battery.
    Audit(AuditArgs),
}

#[derive(Args)]
struct LearnArgs {
    /// JSON experiment config.
    config: Option<PathBuf>,
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    epsilon_floor: Option<f64>,
    /// omega=W | 1/k | inv_k_log_k
    #[arg(long, value_parser = parse_schedule_arg)]
    schedule: Option<ScheduleChoice>,
    /// ref | ref:S,A | mean | max
    #[arg(long = "f")]
    functional: Option<RviFunctional>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, overrides_with = "no_oracle")]
    oracle: bool,
    #[arg(long, overrides_with = "oracle")]
    no_oracle: bool,
    /// Oracle solver tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct AuditArgs {
    /// Audit this instance instead of a random battery.
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value_t = 4)]
    states: usize,
    #[arg(long, default_value_t = 3)]
    actions: usize,
    #[arg(long, default_value_t = 2)]
    constraints: usize,
    #[arg(long, default_value_t = 0.9)]
    gamma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_schedule_arg(s: &str) -> std::result::Result<ScheduleChoice, String> {
    parse_schedule(s).map_err(|e| e.to_string())
}

fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("peakrl-out"))
}

fn write_json<T: serde::Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(path)
}

fn run(cli: Cli) -> Result<ExitStatus> {
    match cli.command {
        Command::Validate { instance } => {
            let inst = load_instance(&instance)?;
            let report = validate_instance(&inst)?;
            for c in &report.checks {
                println!("{:<22} {:<7} {}", c.name, format!("{:?}", c.status).to_lowercase(), c.detail);
            }
            Ok(report.exit)
        }
        Command::Solve { instance, mode, tol, out } => {
            let inst = load_instance(&instance)?;
            let mode = mode.unwrap_or(if inst.gamma().is_some() { Mode::Discounted } else { Mode::Average });
            let report = solve_instance(&inst, mode, tol)?;
            let path = write_json(&out_dir(out), "solution.json", &report)?;
            println!("mode        {mode}");
            println!("verdict     {:?} (margin {:.6e})", report.feasibility.status, report.feasibility.margin);
            if let Some(g) = report.gain {
                println!("gain        {g}");
            }
            println!("policy      {:?}", report.policy);
            if let Some(passed) = report.audit_passed {
                println!("audit       {}", if passed { "pass" } else { "FAIL" });
            }
            for note in &report.notes {
                println!("note        {note}");
            }
            println!("solution    {}", path.display());
            Ok(report.exit)
        }
        Command::Learn(args) => {
            let flags = LearnFlags {
                instance: args.instance,
                mode: args.mode,
                steps: args.steps,
                reps: args.reps,
                seed: args.seed,
                epsilon_floor: args.epsilon_floor,
                schedule: args.schedule,
                functional: args.functional,
                out: args.out,
                oracle: if args.no_oracle {
                    Some(false)
                } else if args.oracle {
                    Some(true)
                } else {
                    None
                },
                tol: args.tol,
            };
            let env_out = std::env::var(OUT_DIR_ENV).ok();
            let config = ExperimentConfig::resolve(&flags, args.config.as_deref(), env_out.as_deref())?;
            let summary = run_experiment(&config)?;
            println!("replications {} x {} steps ({})", summary.replications, summary.steps, summary.mode);
            if let (Some(m), Some([q1, q3])) = (summary.final_error_median, summary.final_error_iqr) {
                println!("final error  median {m:.6} (IQR {q1:.6} .. {q3:.6})");
            }
            if let Some(m) = summary.f_error_median {
                println!("|f - v*|     median {m:.6}");
            }
            if let Some(k) = summary.policy_matches {
                println!("policy match {k}/{}", summary.replications);
            }
            println!("violations   {}", summary.total_violations);
            println!("output       {}", config.out_dir.display());
            Ok(ExitStatus::Success)
        }
        Command::Audit(args) => {
            let out = out_dir(args.out);
            if let Some(path) = args.instance {
                let report = audit_instance(&path, args.mode, args.tol)?;
                let file = write_json(&out, "audit.json", &report)?;
                println!("audit {} (max value gap {:.3e})", if report.passed { "pass" } else { "FAIL" }, report.max_value_gap);
                println!("report {}", file.display());
                return Ok(if report.passed { ExitStatus::Success } else { ExitStatus::ValidationFailure });
            }
            let config = AuditBatteryConfig {
                count: args.count,
                n_states: args.states,
                n_actions: args.actions,
                n_constraints: args.constraints,
                mode: args.mode.unwrap_or(Mode::Discounted),
                gamma: args.gamma,
                seed: args.seed,
                tolerance: args.tol,
            };
            let report = audit_battery(&config)?;
            let file = write_json(&out, "audit.json", &report)?;
            println!("audit {}/{} passed ({})", report.passed, report.total, config.mode);
            for v in report.verdicts.iter().filter(|v| !v.passed) {
                println!("  instance {} (seed {}): gap {:.3e}", v.index, v.seed, v.max_value_gap);
            }
            println!("report {}", file.display());
            Ok(report.exit)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let status = run(cli).unwrap_or_else(|e: Error| {
        eprintln!("error: {e}");
        ExitStatus::from(&e)
    });
    ExitCode::from(status.code() as u8)
}
