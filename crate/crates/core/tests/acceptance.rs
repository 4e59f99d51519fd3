//! Acceptance suite. Runs every criterion at its stated tolerance and
//! prints one PASS/FAIL line per criterion; exits nonzero if any fails.
//!
//! `cargo test --test acceptance` runs everything; pass criterion numbers
//! (`cargo test --test acceptance -- 5 6`) to run a subset.

use std::time::Instant;

use peakrl::envs::{benchmark_instance, benchmark_violating_action, random_instance, FeasibilityMode, RandomParams};
use peakrl::experiment::{audit_battery, derive_seed, quantile, AuditBatteryConfig, OracleTarget};
use peakrl::learners::{
    run_learning, validate_functional, validate_schedule, AverageSchedule, DiscountedSchedule, ExplorationPolicy,
    Learner, LearnerConfig, QTable, RviFunctional, ScheduleFamily, TableFunctional,
};
use peakrl::mdp::{sample_transition, MdpInstance, Mode};
use peakrl::oracle::{
    brute_force_policy_search, feasibility_check, transformed_bellman, transformed_relative_value_iteration,
    transformed_rvi_with_reference, transformed_value_iteration, FeasibilityStatus,
};
use peakrl::transform::{clip_bound, transform_sample, ClipBound};
use peakrl::{seeded_rng, Error};
use rand::Rng;
use rayon::prelude::*;

/// Discount factor of the learner benchmark.
const BENCH_GAMMA: f64 = 0.9;
const BENCH_SEEDS: u64 = 20;
const BENCH_STEPS: u64 = 1_000_000;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

/// Criterion 1: closed form of the clipped Lagrangian on an exhaustive
/// sign grid, against an indicator rule and a numeric lambda grid.
fn transform_closed_form() -> Outcome {
    let c = 1.0;
    let bounds = [
        clip_bound(c, Some(0.9), Mode::Discounted).unwrap(),
        clip_bound(c, None, Mode::Average).unwrap(),
    ];
    let lambdas = [0.0, 0.1, 1.0, 10.0, 1e2, 1e3, 1e4, 1e6];
    let (mut cases, mut indicator_ok, mut grid_ok) = (0, 0, 0);
    let mut worst: f64 = 0.0;
    for bound in &bounds {
        for r in [-c, -c / 2.0, 0.0, c / 2.0, c] {
            for j in 0..=3u32 {
                for code in 0..3usize.pow(j) {
                    let g: Vec<f64> = (0..j)
                        .map(|i| match (code / 3usize.pow(i)) % 3 {
                            0 => -0.7 * c,
                            1 => 0.0,
                            _ => 0.4 * c,
                        })
                        .collect();
                    cases += 1;
                    let got = transform_sample(r, &g, bound);
                    let indicator = if g.iter().any(|&x| x < 0.0) { -bound.value() } else { r };
                    indicator_ok += usize::from(got == indicator);
                    // min over a lambda grid in [0, 1e6]^J, then the clip.
                    let mut inner = f64::INFINITY;
                    for idx in 0..lambdas.len().pow(j) {
                        let value = r + (0..j as usize)
                            .map(|i| lambdas[(idx / lambdas.len().pow(i as u32)) % lambdas.len()] * g[i])
                            .sum::<f64>();
                        inner = inner.min(value);
                    }
                    let numeric = inner.max(-bound.value());
                    worst = worst.max((numeric - got).abs());
                    grid_ok += usize::from((numeric - got).abs() <= 1e-6);
                }
            }
        }
    }
    outcome(
        indicator_ok == cases && grid_ok == cases,
        format!("{indicator_ok}/{cases} indicator, {grid_ok}/{cases} lambda-grid (max gap {worst:.1e})"),
    )
}

/// Criterion 2: discounted equivalence battery.
fn discounted_equivalence() -> Outcome {
    let report = audit_battery(&AuditBatteryConfig {
        seed: 2,
        ..AuditBatteryConfig::default()
    })
    .unwrap();
    let worst = report.verdicts.iter().map(|v| v.max_value_gap).fold(0.0, f64::max);
    outcome(
        report.passed == 100 && report.total == 100,
        format!("{}/{} pass, max value gap {worst:.1e}", report.passed, report.total),
    )
}

/// Criterion 3: average-reward equivalence battery with a planted
/// recurrent state; also compares the RVI gain with brute force directly.
fn average_equivalence() -> Outcome {
    let config = AuditBatteryConfig {
        mode: Mode::Average,
        seed: 3,
        ..AuditBatteryConfig::default()
    };
    let report = audit_battery(&config).unwrap();
    let gain_gaps: Vec<f64> = (0..config.count)
        .into_par_iter()
        .map(|i| {
            let inst = config.instance(i).unwrap();
            let sol = transformed_relative_value_iteration(&inst, 1e-11).unwrap();
            let best = brute_force_policy_search(&inst, Mode::Average).unwrap();
            (sol.gain() - best.value).abs()
        })
        .collect();
    let gains_ok = gain_gaps.iter().filter(|&&g| g <= 1e-6).count();
    let worst = gain_gaps.iter().copied().fold(0.0, f64::max);
    outcome(
        report.passed == 100 && gains_ok == 100,
        format!(
            "{}/100 audits pass, {gains_ok}/100 gains within 1e-6 (max gap {worst:.1e})",
            report.passed
        ),
    )
}

/// Criterion 4: feasibility sign test against brute-force ground truth.
fn feasibility_detection() -> Outcome {
    let params = RandomParams::new(4, 3, 2).with_gamma(0.9);
    let cases: Vec<(FeasibilityMode, u64)> = (0..50)
        .map(|i| (FeasibilityMode::GuaranteedFeasible, derive_seed(4, i)))
        .chain((0..50).map(|i| (FeasibilityMode::GuaranteedInfeasible, derive_seed(40, i))))
        .collect();
    let results: Vec<(bool, bool)> = cases
        .par_iter()
        .map(|&(mode, seed)| {
            let inst = random_instance(&params, mode, seed).unwrap();
            let bound = ClipBound::for_instance(&inst, Mode::Discounted).unwrap();
            let (q, _) = transformed_value_iteration(&inst, &bound, 1e-10).unwrap();
            let verdict = feasibility_check(&q, None, 1e-6 * inst.bound_c());
            let truth = match brute_force_policy_search(&inst, Mode::Discounted) {
                Ok(_) => true,
                Err(Error::Infeasible(_)) => false,
                Err(e) => panic!("{e}"),
            };
            let expected = if truth { FeasibilityStatus::Feasible } else { FeasibilityStatus::Infeasible };
            (verdict.status == expected, verdict.status == FeasibilityStatus::Inconclusive)
        })
        .collect();
    let agree = results.iter().filter(|r| r.0).count();
    let inconclusive = results.iter().filter(|r| r.1).count();
    outcome(
        agree == 100 && inconclusive == 0,
        format!("{agree}/100 verdicts agree, {inconclusive} inconclusive"),
    )
}

fn benchmark_learner(mode: Mode) -> (MdpInstance, LearnerConfig) {
    let gamma = (mode == Mode::Discounted).then_some(BENCH_GAMMA);
    let inst = benchmark_instance(2, gamma).unwrap();
    let config = LearnerConfig {
        mode,
        discounted_schedule: DiscountedSchedule::new(0.7).unwrap(),
        average_schedule: AverageSchedule::InvK,
        exploration: ExplorationPolicy::constant(0.05),
        functional: RviFunctional::ReferenceEntry { state: 0, action: 0 },
        steps: BENCH_STEPS,
        ..LearnerConfig::default()
    };
    (inst, config)
}

/// Criterion 5: discounted Q-learning on the benchmark.
fn discounted_convergence() -> Outcome {
    let (inst, config) = benchmark_learner(Mode::Discounted);
    let target = OracleTarget::compute(&inst, &config, 1e-12).unwrap();
    let runs: Vec<(f64, bool)> = (0..BENCH_SEEDS)
        .into_par_iter()
        .map(|seed| {
            let cfg = LearnerConfig { seed, ..config.clone() };
            let out = run_learning(&inst, &cfg, |_, _| {}).unwrap();
            (out.q.sup_distance(&target.q), target.policy_matches(&out.q))
        })
        .collect();
    let errors: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let median = quantile(&errors, 0.5).unwrap();
    let matches = runs.iter().filter(|r| r.1).count();
    let c = inst.bound_c();
    outcome(
        median < 0.05 * c && matches >= 19,
        format!(
            "median sup error {median:.4} (< {:.3}), max {:.4}, policy match {matches}/{BENCH_SEEDS}",
            0.05 * c,
            errors.iter().copied().fold(0.0, f64::max)
        ),
    )
}

/// Criterion 6: RVI Q-learning on the benchmark, f = Q(0,0), beta = 1/k.
fn average_convergence() -> Outcome {
    let (inst, config) = benchmark_learner(Mode::Average);
    let v_star = transformed_relative_value_iteration(&inst, 1e-12).unwrap().gain();
    let gaps: Vec<f64> = (0..BENCH_SEEDS)
        .into_par_iter()
        .map(|seed| {
            let cfg = LearnerConfig { seed, ..config.clone() };
            let out = run_learning(&inst, &cfg, |_, _| {}).unwrap();
            (config.functional.eval(&out.q) - v_star).abs()
        })
        .collect();
    let c = inst.bound_c();
    let within = gaps.iter().filter(|&&g| g < 0.05 * c).count();
    outcome(
        within >= 19,
        format!(
            "|f(Q) - v*| < {:.3} in {within}/{BENCH_SEEDS} seeds (v* = {v_star:.4}, median gap {:.4})",
            0.05 * c,
            quantile(&gaps, 0.5).unwrap()
        ),
    )
}

/// Criterion 7: the greedy policy never violates; with exploration
/// decaying to zero the violation count grows sublinearly.
fn violation_avoidance() -> Outcome {
    let (inst, base) = benchmark_learner(Mode::Discounted);
    let steps = 1_000_000u64;
    let config = LearnerConfig {
        exploration: ExplorationPolicy::inverse_decay(0.5, 0.0, 1000.0),
        steps,
        seed: 7,
        ..base
    };
    let out = run_learning(&inst, &config, |_, _| {}).unwrap();
    // Same seed, one tenth of the horizon: an exact prefix of the long run.
    let short = LearnerConfig {
        steps: steps / 10,
        ..config.clone()
    };
    let early = run_learning(&inst, &short, |_, _| {}).unwrap().violations;
    let total = out.violations;
    let slope = ((total as f64) / (early.max(1) as f64)).log10();

    // Greedy rollout of the learned table with exploration off.
    let greedy_steps = 200_000u64;
    let mut greedy_violations = 0u64;
    let mut rng = seeded_rng(99);
    let mut s = 0usize;
    let q = &out.q;
    for _ in 0..greedy_steps {
        let a = q.argmax_set(s, 0.0)[0];
        greedy_violations += u64::from(inst.constraint_samples(s, a).iter().any(|&g| g < 0.0));
        s = sample_transition(&inst, s, a, &mut rng).unwrap();
    }
    let greedy_clean = (0..inst.n_states()).all(|s| !q.argmax_set(s, 0.0).contains(&benchmark_violating_action(s)));
    outcome(
        greedy_violations == 0 && greedy_clean && slope < 0.5,
        format!(
            "greedy rollout {greedy_violations}/{greedy_steps} violations; decaying exploration: {early} by step {}, {total} by step {steps} (log-log slope {slope:.3} < 0.5)",
            steps / 10
        ),
    )
}

/// Criterion 8: learner state size does not depend on J.
fn memory_invariant() -> Outcome {
    let footprints: Vec<_> = [1usize, 2, 8, 32]
        .iter()
        .map(|&j| {
            let inst = benchmark_instance(j, Some(BENCH_GAMMA)).unwrap();
            let mut learner = Learner::new(&inst, &LearnerConfig::discounted()).unwrap();
            let mut env = peakrl::envs::InstanceEnv::new(&inst);
            for _ in 0..1000 {
                learner.step(&mut env).unwrap();
            }
            learner.footprint()
        })
        .collect();
    let same = footprints.windows(2).all(|w| w[0] == w[1]);
    outcome(
        same,
        format!(
            "J in {{1,2,8,32}}: {} Q entries, {} counters, {} + {} bytes each",
            footprints[0].q_entries, footprints[0].counter_entries, footprints[0].table_bytes, footprints[0].inline_bytes
        ),
    )
}

/// Criterion 9: functional and schedule validators.
fn validators() -> Outcome {
    let mut verdicts = Vec::new();
    for (name, f, expect) in [
        ("reference_entry", RviFunctional::ReferenceEntry { state: 1, action: 2 }, true),
        ("mean", RviFunctional::MeanOfTable, true),
        ("max", RviFunctional::MaxOfTable, true),
    ] {
        verdicts.push((name.to_string(), validate_functional(&f, 4, 3, 500, 9).passes == expect));
    }
    let squared = |q: &QTable| q.get(0, 0) * q.get(0, 0);
    verdicts.push(("Q(0,0)^2".into(), !validate_functional(&squared, 4, 3, 500, 9).passes));
    for (family, expect) in [
        (ScheduleFamily::InverseK, true),
        (ScheduleFamily::InverseKLogK, true),
        (ScheduleFamily::InversePower { omega: 0.5 }, false),
    ] {
        let report = validate_schedule(&family, 1_000_000).unwrap();
        verdicts.push((family.name(), report.passes == expect && report.numeric_agrees));
    }
    let ok = verdicts.iter().filter(|v| v.1).count();
    let wrong: Vec<&str> = verdicts.iter().filter(|v| !v.1).map(|v| v.0.as_str()).collect();
    outcome(
        ok == verdicts.len(),
        format!("{ok}/{} expected verdicts{}", verdicts.len(), if wrong.is_empty() { String::new() } else { format!(", wrong: {wrong:?}") }),
    )
}

/// Criterion 10: gamma-contraction of the transformed Bellman operator and
/// invariance of the RVI gain to the normalization state.
fn contraction_and_normalization() -> Outcome {
    let gamma = 0.9;
    let inst = random_instance(&RandomParams::new(5, 3, 2).with_gamma(gamma), FeasibilityMode::UnconstrainedRandom, 10)
        .unwrap();
    let bound = ClipBound::for_instance(&inst, Mode::Discounted).unwrap();
    let mut rng = seeded_rng(10);
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let scale = 10f64.powi(i % 5 - 1);
        let mut table = || {
            let rows = (0..5).map(|_| (0..3).map(|_| scale * (2.0 * rng.random::<f64>() - 1.0)).collect()).collect();
            QTable::from_rows(rows).unwrap()
        };
        let (q1, q2) = (table(), table());
        let t1 = transformed_bellman(&inst, &bound, &q1).unwrap();
        let t2 = transformed_bellman(&inst, &bound, &q2).unwrap();
        worst = worst.max(t1.sup_distance(&t2) / q1.sup_distance(&q2));
    }
    let avg = random_instance(&RandomParams::new(5, 3, 2).with_recurrent_state(2), FeasibilityMode::GuaranteedFeasible, 11)
        .unwrap();
    let gains: Vec<f64> = (0..avg.n_states())
        .map(|s| transformed_rvi_with_reference(&avg, s, 1e-12).unwrap().gain())
        .collect();
    let spread = gains.iter().copied().fold(f64::NEG_INFINITY, f64::max) - gains.iter().copied().fold(f64::INFINITY, f64::min);
    outcome(
        worst <= gamma + 1e-12 && spread <= 1e-9,
        format!("max ratio {worst:.6} (<= {gamma}), gain spread over s_ref {spread:.1e} (<= 1e-9)"),
    )
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 10] = [
        (1, "transform closed form", transform_closed_form),
        (2, "discounted equivalence", discounted_equivalence),
        (3, "average equivalence", average_equivalence),
        (4, "feasibility detection", feasibility_detection),
        (5, "discounted learner convergence", discounted_convergence),
        (6, "average learner convergence", average_convergence),
        (7, "violation avoidance", violation_avoidance),
        (8, "memory independent of J", memory_invariant),
        (9, "functional and schedule validators", validators),
        (10, "contraction and normalization", contraction_and_normalization),
    ];
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, name, run) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let out = run();
        failed += usize::from(!out.passed);
        println!(
            "criterion {id:>2} {} {name}: {} [{:.1}s]",
            if out.passed { "PASS" } else { "FAIL" },
            out.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
