//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use opinion_merge_core::engine::{run_competitive, FixedForecaster, Players, ScriptedReality};
use opinion_merge_core::scenarios::{gen_forecast_pair, Regime, SamplingReality};
use opinion_merge_core::strategies::alpha_pair;
use opinion_merge_core::verify::suites::{
    anytime_growth, big_alpha_sweep, divergence_suite, fixed_growth_sweep, forcer_sweep, identity_sweep, lemma_suite,
    mixture_sweep, set_aside_check, IDENTITY_ALPHAS,
};
use opinion_merge_core::verify::{check_small_alpha_identity, CheckReport};
use opinion_merge_core::{AlphaParam, Distribution, ExtReal, LogCapital, Role};

const SEED: u64 = 1;
const IDENTITY_BUDGET: Duration = Duration::from_secs(5);
const ANCHOR_TOLERANCE: f64 = 1e-6;
const ANCHOR_VALUE: f64 = 0.4462871;
const ANCHOR_F_I: [f64; 2] = [1.5, 0.5];
const ANCHOR_F_II: [f64; 2] = [0.8333333, 2.5];

type Criterion = Box<dyn Fn() -> Outcome>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn from_reports(reports: &[CheckReport]) -> Outcome {
    let failed: Vec<&str> = reports.iter().filter(|r| !r.pass).map(|r| r.name.as_str()).collect();
    let worst = reports.iter().map(|r| r.max_violation).fold(0.0, f64::max);
    let points: usize = reports.iter().map(|r| r.points.len()).sum();
    let detail = if failed.is_empty() {
        format!("{} reports, {points} points, max violation {worst:e}", reports.len())
    } else {
        format!("failed: {}", failed.join(", "))
    };
    Outcome { pass: failed.is_empty() && !reports.is_empty(), detail }
}

fn lift<E: std::fmt::Display>(r: Result<Outcome, E>) -> Outcome {
    r.unwrap_or_else(|e| Outcome { pass: false, detail: format!("error: {e}") })
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let result = identity_sweep(SEED);
    let elapsed = start.elapsed();
    let mut out = lift(result.map(|r| from_reports(&r)));
    out.pass &= elapsed < IDENTITY_BUDGET;
    out.detail = format!("{}, {:.2} s (budget {} s)", out.detail, elapsed.as_secs_f64(), IDENTITY_BUDGET.as_secs());
    out
}

fn criterion_2() -> Outcome {
    let p_i = Distribution::new(vec![0.5, 0.5]).unwrap();
    let p_ii = Distribution::new(vec![0.9, 0.1]).unwrap();
    let mut worst: f64 = 0.0;
    for w in 0..2 {
        let (mut si, mut sii) = alpha_pair(AlphaParam::new(0.0).unwrap());
        let t = run_competitive(
            Players {
                forecaster_i: &mut FixedForecaster(p_i.clone()),
                forecaster_ii: &mut FixedForecaster(p_ii.clone()),
                sceptic_i: &mut si,
                sceptic_ii: &mut sii,
                reality: &mut ScriptedReality::new(vec![w]),
            },
            1,
        );
        let t = match t {
            Ok(t) => t,
            Err(e) => return Outcome { pass: false, detail: format!("error: {e}") },
        };
        let r = &t.rounds[0];
        for (got, want) in r.f_i.payoff().iter().zip(ANCHOR_F_I).chain(r.f_ii.payoff().iter().zip(ANCHOR_F_II)) {
            worst = worst.max((got.value() - want).abs());
        }
        let log = |l: LogCapital| l.value().map_or(f64::NAN, ExtReal::value);
        let lhs = 2.0 * log(r.log_k_i) + 2.0 * log(r.log_k_ii);
        worst = worst.max((lhs - ANCHOR_VALUE).abs());
    }
    Outcome {
        pass: worst <= ANCHOR_TOLERANCE,
        detail: format!("max deviation {worst:e} (tolerance {ANCHOR_TOLERANCE:e})"),
    }
}

fn criterion_12() -> Outcome {
    let mut problems = Vec::new();
    let mut stopped_runs = 0;
    let mut indefinite_points = 0;
    let mut runs = 0;
    for a in IDENTITY_ALPHAS {
        let alpha = AlphaParam::new(a).unwrap();
        for s in SEED..SEED + 10 {
            runs += 1;
            let (mut fi, mut fii) = gen_forecast_pair(s, 4, Regime::Singular).unwrap();
            let (mut si, mut sii) = alpha_pair(alpha);
            let t = run_competitive(
                Players {
                    forecaster_i: &mut fi,
                    forecaster_ii: &mut fii,
                    sceptic_i: &mut si,
                    sceptic_ii: &mut sii,
                    reality: &mut SamplingReality::new(Role::I, s),
                },
                1,
            )
            .unwrap();
            let r = &t.rounds[0];
            // For |α| > 1 the weight on ln K^II is negative and the pair sends
            // one capital to zero instead; only the weighted sum is +∞ there.
            if a.abs() < 1.0 {
                let infinite =
                    [r.log_k_i, r.log_k_ii].iter().filter(|l| l.value().is_some_and(|v| v.is_pos_infinity())).count();
                if infinite != 1 {
                    problems.push(format!("singular alpha={a} seed={s}: {infinite} infinite capitals"));
                }
            }
            let report = check_small_alpha_identity(&t, alpha);
            let both_infinite =
                report.points[0].lhs.is_some_and(|l| l.is_pos_infinity()) && report.points[0].rhs.is_pos_infinity();
            if !report.pass || !both_infinite {
                problems.push(format!("singular alpha={a} seed={s}: identity not satisfied as +inf = +inf"));
            }

            let (mut fi, mut fii) = gen_forecast_pair(s, 4, Regime::ZeroMixed).unwrap();
            let (mut si, mut sii) = alpha_pair(alpha);
            let t = run_competitive(
                Players {
                    forecaster_i: &mut fi,
                    forecaster_ii: &mut fii,
                    sceptic_i: &mut si,
                    sceptic_ii: &mut sii,
                    reality: &mut SamplingReality::new(Role::I, s),
                },
                200,
            )
            .unwrap();
            if si.is_stopped() || sii.is_stopped() {
                stopped_runs += 1;
            }
            let report = check_small_alpha_identity(&t, alpha);
            indefinite_points += report.points.iter().filter(|p| p.lhs.is_none()).count();
            if !report.pass {
                problems.push(format!("zero_mixed alpha={a} seed={s}: identity failed"));
            }
        }
    }
    if stopped_runs == 0 {
        problems.push("zero_mixed never raised the stop flag".into());
    }
    Outcome {
        pass: problems.is_empty(),
        detail: if problems.is_empty() {
            format!("{runs} singular runs at +inf = +inf, stop flag in {stopped_runs}/{runs} zero_mixed runs, {indefinite_points} indefinite points")
        } else {
            problems.join("; ")
        },
    }
}

const REPRO_CONFIG: &str = r#"
horizon = 100
outcomes = 3
seed = 9

[scenario]
regime = "drift"
reality = "sample_i"

[sceptic_i]
strategy = "alpha_pair"
alpha = 0.5

[sceptic_ii]
strategy = "random"
"#;

fn criterion_13() -> Outcome {
    let run = || -> Result<Vec<Vec<u8>>, String> {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let config = dir.path().join("run.toml");
        std::fs::write(&config, REPRO_CONFIG).map_err(|e| e.to_string())?;
        let mut files = Vec::new();
        for i in 0..2 {
            let out = dir.path().join(format!("t{i}.csv"));
            let status = Command::new(env!("CARGO_BIN_EXE_opinion-merge"))
                .args(["run", "--config"])
                .arg(&config)
                .arg("--output")
                .arg(&out)
                .env_remove("OPINION_MERGE_SEED")
                .output()
                .map_err(|e| e.to_string())?
                .status;
            if !status.success() {
                return Err(format!("run {i} exited with {status}"));
            }
            files.push(std::fs::read(&out).map_err(|e| e.to_string())?);
        }
        Ok(files)
    };
    match run() {
        Ok(files) => Outcome {
            pass: files[0] == files[1] && !files[0].is_empty(),
            detail: format!("two runs, {} and {} bytes", files[0].len(), files[1].len()),
        },
        Err(e) => Outcome { pass: false, detail: e },
    }
}

fn lemma_reports(prefix: &str) -> Outcome {
    lift(lemma_suite(SEED).map(|r| {
        let picked: Vec<CheckReport> = r.into_iter().filter(|c| c.name.starts_with(prefix)).collect();
        from_reports(&picked)
    }))
}

fn main() {
    let criteria: Vec<(&str, Criterion)> = vec![
        ("small-alpha identity sweep", Box::new(criterion_1)),
        ("one-round closed-form anchor", Box::new(criterion_2)),
        ("big-alpha bound against random bets", Box::new(|| lift(big_alpha_sweep(SEED).map(|r| from_reports(&r))))),
        ("fixed-horizon growth bounds", Box::new(|| lift(fixed_growth_sweep(SEED).map(|r| from_reports(&r))))),
        ("anytime growth bounds", Box::new(|| lift(anytime_growth(SEED, 2000).map(|r| from_reports(&r))))),
        ("quadratic forcer closed form", Box::new(|| lift(forcer_sweep(SEED, 100).map(|r| from_reports(&[r]))))),
        ("set-aside reserve", Box::new(|| lift(set_aside_check(&[1, 5, 20]).map(|r| from_reports(&[r]))))),
        ("mixture capital", Box::new(|| lift(mixture_sweep(SEED, 50).map(|r| from_reports(&[r]))))),
        ("lemma6 bound and constant", Box::new(|| lemma_reports("lemma6"))),
        ("lemma7 grid and constant", Box::new(|| lemma_reports("lemma7"))),
        ("divergence relations", Box::new(|| lift(divergence_suite(SEED).map(|r| from_reports(&r))))),
        ("exceptional paths", Box::new(criterion_12)),
        ("reproducible transcripts", Box::new(criterion_13)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let out = check();
        if !out.pass {
            failed += 1;
        }
        println!("{} criterion {}: {name}: {}", if out.pass { "PASS" } else { "FAIL" }, i + 1, out.detail);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
