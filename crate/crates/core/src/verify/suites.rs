//! Seeded verification suites composed from the checkers.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::divergence::AlphaParam;
use crate::engine::{
    run_competitive, run_semimartingale, run_testing, EngineError, FixedForecaster, Forecaster, MeanConstraint,
    Players, Reality, Representation, Role, Sceptic, ScriptedReality, Transcript,
};
use crate::extmath::{ExtReal, LogCapital};
use crate::measures::{mixture_densities, BettingFunction, DensityPair, Distribution};
use crate::scenarios::{
    gen_forecast_pair, player_rng, sample_simplex, AdversarialReality, MartingaleReality, Objective, RandomSceptic,
    Regime, SamplingReality, ScenarioError,
};
use crate::strategies::{
    alpha_pair, anytime_epsilon, big_alpha_sceptic_i, growth_joint_anytime, growth_joint_fixed,
    growth_sceptic_i_anytime, growth_sceptic_i_fixed, AlphaMember, GrowthError, Mixture, MixtureError, QuadraticForcer,
    RatioTracker, SetAside, StrategyError,
};

use super::{
    check_big_alpha_bound, check_divergence_relations, check_growth_bounds, check_growth_series, check_lemma6_pairs,
    check_lemma7, check_small_alpha_identity, lemma6_constant, lemma7_constant, log_grid, CheckPoint, CheckReport,
    GrowthVariant, VerifyError, FORMULA_TOLERANCE,
};

/// Stream reserved for generating standalone density pairs.
const PAIR_STREAM: u64 = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    All,
    Divergence,
    Theorem2,
    Lemmas,
    Growth,
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::All => "all",
            Suite::Divergence => "divergence",
            Suite::Theorem2 => "theorem2",
            Suite::Lemmas => "lemmas",
            Suite::Growth => "growth",
        };
        f.write_str(s)
    }
}

impl FromStr for Suite {
    type Err = SuiteError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(Suite::All),
            "divergence" => Ok(Suite::Divergence),
            "theorem2" => Ok(Suite::Theorem2),
            "lemmas" => Ok(Suite::Lemmas),
            "growth" => Ok(Suite::Growth),
            _ => Err(SuiteError::UnknownSuite(s.to_string())),
        }
    }
}

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("unknown suite '{0}'")]
    UnknownSuite(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Growth(#[from] GrowthError),
    #[error(transparent)]
    Mixture(#[from] MixtureError),
}

/// Orders of the identity sweep.
pub const IDENTITY_ALPHAS: [f64; 5] = [-3.0, -0.5, 0.0, 0.5, 3.0];
/// Orders of the big-alpha sweep.
pub const BIG_ALPHAS: [f64; 3] = [-3.0, -2.0, -1.5];
/// Orders of the auxiliary inequality on likelihood jumps.
pub const LEMMA6_ALPHAS: [f64; 5] = [-0.9, -0.5, 0.0, 0.5, 0.9];
/// Exponents of the auxiliary inequality on truncated logarithms.
pub const LEMMA7_GAMMAS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];
/// Horizons of the fixed-horizon growth sweep.
pub const FIXED_HORIZONS: [u64; 4] = [4, 25, 100, 400];
/// Number of random pairs in the pair-based sweeps.
pub const PAIR_COUNT: usize = 1000;
/// Consecutive seeds per engine sweep.
pub const SEEDS_PER_SWEEP: u64 = 10;

const ROUNDS: usize = 200;
const TIMID_C: f64 = 2.0;
const ANYTIME_K_MAX: u32 = 16;
const ANYTIME_ROUNDS: usize = 2000;

fn alpha(a: f64) -> AlphaParam {
    AlphaParam::new(a).expect("suite orders are valid")
}

/// A random density pair; each forecast drops each outcome with
/// probability 1/5, so zeros and disjoint supports occur.
pub fn random_pair<R: Rng + ?Sized>(rng: &mut R) -> DensityPair {
    let m = rng.random_range(2..=6);
    let draw = |rng: &mut R| {
        let mut support: Vec<usize> = (0..m).filter(|_| rng.random_bool(0.8)).collect();
        if support.is_empty() {
            support.push(rng.random_range(0..m));
        }
        sample_simplex(rng, m, &support)
    };
    let p = draw(rng);
    let q = draw(rng);
    mixture_densities(&p, &q).expect("same outcome space")
}

fn random_pairs(seed: u64, count: usize) -> Vec<DensityPair> {
    let mut rng = player_rng(seed, PAIR_STREAM);
    (0..count).map(|_| random_pair(&mut rng)).collect()
}

/// Plays a generated scenario.
pub fn play_scenario(
    seed: u64,
    m: usize,
    regime: Regime,
    sceptic_i: &mut dyn Sceptic,
    sceptic_ii: &mut dyn Sceptic,
    reality: &mut dyn Reality,
    horizon: usize,
) -> Result<Transcript, SuiteError> {
    let (mut fi, mut fii) = gen_forecast_pair(seed, m, regime)?;
    Ok(run_competitive(
        Players { forecaster_i: &mut fi, forecaster_ii: &mut fii, sceptic_i, sceptic_ii, reality },
        horizon,
    )?)
}

/// Runs the requested suite; `seed` offsets every generator.
pub fn run_suite(suite: Suite, seed: u64) -> Result<Vec<CheckReport>, SuiteError> {
    let mut out = Vec::new();
    if matches!(suite, Suite::All | Suite::Divergence) {
        out.extend(divergence_suite(seed)?);
    }
    if matches!(suite, Suite::All | Suite::Theorem2) {
        out.extend(identity_sweep(seed)?);
        out.extend(exceptional_sweep(seed)?);
        out.extend(big_alpha_sweep(seed)?);
    }
    if matches!(suite, Suite::All | Suite::Lemmas) {
        out.extend(lemma_suite(seed)?);
        out.push(forcer_sweep(seed, 100)?);
        out.push(set_aside_check(&[1, 5, 20])?);
        out.push(mixture_sweep(seed, 50)?);
    }
    if matches!(suite, Suite::All | Suite::Growth) {
        out.extend(fixed_growth_sweep(seed)?);
        out.extend(anytime_growth(seed, ANYTIME_ROUNDS)?);
    }
    Ok(out)
}

pub fn divergence_suite(seed: u64) -> Result<Vec<CheckReport>, SuiteError> {
    let pairs = random_pairs(seed, PAIR_COUNT);
    let mut grid = vec![-3.0, -2.0, -1.5, 1.5, 2.0, 3.0];
    grid.extend((-18..=18).map(|i| f64::from(i) * 0.05));
    Ok(check_divergence_relations(&pairs, &grid)?)
}

/// Identity of the alpha pair over orders, outcome-space sizes, regimes,
/// an adversarial and a sampling Reality, and consecutive seeds.
pub fn identity_sweep(seed: u64) -> Result<Vec<CheckReport>, SuiteError> {
    let mut out = Vec::new();
    for a in IDENTITY_ALPHAS {
        let mut reports = Vec::new();
        for m in [2, 5] {
            for regime in [Regime::Agree, Regime::Drift, Regime::Timid { c: TIMID_C }] {
                for s in seed..seed + SEEDS_PER_SWEEP {
                    for adversarial in [true, false] {
                        let (mut si, mut sii) = alpha_pair(alpha(a));
                        let mut reality: Box<dyn Reality> = if adversarial {
                            Box::new(AdversarialReality::new(Objective::MaxRatio))
                        } else {
                            Box::new(SamplingReality::new(Role::I, s))
                        };
                        let t = play_scenario(s, m, regime, &mut si, &mut sii, reality.as_mut(), ROUNDS)?;
                        reports.push(check_small_alpha_identity(&t, alpha(a)));
                    }
                }
            }
        }
        out.push(CheckReport::combine(format!("identity_sweep(alpha={a})"), reports));
    }
    Ok(out)
}

/// Identity on singular and one-sided-zero scenarios.
pub fn exceptional_sweep(seed: u64) -> Result<Vec<CheckReport>, SuiteError> {
    let mut out = Vec::new();
    for regime in [Regime::Singular, Regime::ZeroMixed] {
        let mut reports = Vec::new();
        for a in IDENTITY_ALPHAS {
            for s in seed..seed + SEEDS_PER_SWEEP {
                let (mut si, mut sii) = alpha_pair(alpha(a));
                let mut reality = SamplingReality::new(Role::I, s);
                let t = play_scenario(s, 4, regime, &mut si, &mut sii, &mut reality, 20)?;
                reports.push(check_small_alpha_identity(&t, alpha(a)));
            }
        }
        out.push(CheckReport::combine(format!("exceptional_identity({regime})"), reports));
    }
    Ok(out)
}

/// Sceptic I's big-alpha guarantee against random valid bets by Sceptic II.
pub fn big_alpha_sweep(seed: u64) -> Result<Vec<CheckReport>, SuiteError> {
    let mut out = Vec::new();
    for a in BIG_ALPHAS {
        let mut reports = Vec::new();
        for regime in [Regime::Drift, Regime::ZeroMixed, Regime::Timid { c: TIMID_C }] {
            for s in seed..seed + SEEDS_PER_SWEEP {
                let mut si = big_alpha_sceptic_i(a)?;
                let mut sii = RandomSceptic::new(s);
                let mut reality = SamplingReality::new(Role::I, s);
                let t = play_scenario(s, 3, regime, &mut si, &mut sii, &mut reality, ROUNDS)?;
                reports.push(check_big_alpha_bound(&t, alpha(a))?);
            }
        }
        out.push(CheckReport::combine(format!("big_alpha_sweep(alpha={a})"), reports));
    }
    Ok(out)
}

fn constant_report(name: &str, got: f64, want: f64, tolerance: f64) -> CheckReport {
    let point = CheckPoint {
        index: 0,
        lhs: Some(ExtReal::from_f64(got)),
        rhs: ExtReal::from_f64(want),
        violation: (got - want).abs(),
    };
    CheckReport::from_points(name, vec![point], tolerance)
}

/// Values of the two auxiliary constants quoted to seven decimals.
pub const LEMMA6_AT_ZERO: f64 = 3.2295970;
pub const LEMMA7_AT_HALF: f64 = 17.4872127;

pub fn lemma_suite(seed: u64) -> Result<Vec<CheckReport>, SuiteError> {
    let pairs = random_pairs(seed, PAIR_COUNT);
    let mut out = Vec::new();
    for a in LEMMA6_ALPHAS {
        out.push(check_lemma6_pairs(&pairs, a)?);
    }
    out.push(constant_report("lemma6_constant(alpha=0)", lemma6_constant(0.0)?, LEMMA6_AT_ZERO, 1e-6));
    let grid = log_grid(1e-6, 1e3, 10_000);
    for g in LEMMA7_GAMMAS {
        out.push(check_lemma7(g, &grid)?);
    }
    out.push(constant_report("lemma7_constant(gamma=0.5)", lemma7_constant(0.5)?, LEMMA7_AT_HALF, 1e-6));
    Ok(out)
}

/// Quadratic forcer capital against its closed form in the martingale
/// protocol, while within budget.
pub fn forcer_sweep(seed: u64, runs: u64) -> Result<CheckReport, SuiteError> {
    let mut points = Vec::new();
    for s in seed..seed + runs {
        let budget = 5.0 + (s % 4) as f64 * 5.0;
        let (mut forecaster, _) = gen_forecast_pair(s, 2 + (s % 4) as usize, Regime::Drift)?;
        let mut sceptic = QuadraticForcer::announced(budget);
        let mut reality = MartingaleReality::new(s, 1.0);
        let t = run_semimartingale(
            &mut forecaster,
            &mut sceptic,
            &mut reality,
            MeanConstraint::Martingale,
            Representation::Multiplicative,
            50,
        )?;
        let (mut sum, mut var) = (0.0, 0.0);
        for r in &t.rounds {
            let v: f64 = r.xi.iter().zip(r.p.probs()).map(|(x, p)| x * x * p).sum();
            if var + v > budget {
                break;
            }
            sum += r.xi[r.outcome];
            var += v;
            let closed = 1.0 + (sum * sum - var) / budget;
            points.push(CheckPoint {
                index: r.n,
                lhs: Some(ExtReal::from_f64(r.capital)),
                rhs: ExtReal::from_f64(closed),
                violation: (r.capital - closed).abs(),
            });
        }
    }
    Ok(CheckReport::from_points("quadratic_forcer_closed_form", points, FORMULA_TOLERANCE))
}

/// Replays a fixed bet.
struct Repeat(BettingFunction);

impl Sceptic for Repeat {
    fn bet(&mut self, _ctx: &crate::engine::RoundContext<'_>) -> BettingFunction {
        self.0.clone()
    }
}

/// Set-aside capital stays above the reserve on paths that cross the
/// threshold a prescribed number of times, and the reserve never shrinks.
///
/// The inner strategy doubles or halves its capital on a fair coin; the
/// path wins until a unit is banked, then loses twice.
pub fn set_aside_check(crossings: &[usize]) -> Result<CheckReport, SuiteError> {
    let p = Distribution::new(vec![1.0 / 3.0, 2.0 / 3.0]).expect("valid");
    let bet = BettingFunction::from_values(&[2.0, 0.5]);
    let mut points = Vec::new();
    for &k in crossings {
        // Simulate the active capital to script the outcomes.
        let (mut active, mut outcomes, mut done) = (1.0f64, Vec::new(), 0);
        while done < k {
            outcomes.push(0);
            active *= 2.0;
            if active > 2.0 {
                active -= 1.0;
                done += 1;
                outcomes.extend([1, 1]);
                active *= 0.25;
            }
        }
        let n = outcomes.len();
        let mut s = SetAside::new(Repeat(bet.clone()));
        let t = run_testing(&mut FixedForecaster(p.clone()), &mut s, &mut ScriptedReality::new(outcomes), n)?;
        let triggers = s.triggers().to_vec();
        let mut prev_reserve = 0.0;
        for r in &t.rounds {
            let reserve = triggers.iter().filter(|&&j| j <= r.n).count() as f64;
            let below = (reserve - r.capital).max(0.0);
            let shrink = (prev_reserve - reserve).max(0.0);
            prev_reserve = reserve;
            points.push(CheckPoint {
                index: r.n,
                lhs: Some(ExtReal::from_f64(r.capital)),
                rhs: ExtReal::from_f64(reserve),
                violation: below + shrink,
            });
        }
        let count = triggers.len();
        points.push(CheckPoint {
            index: n,
            lhs: Some(ExtReal::from_f64(count as f64)),
            rhs: ExtReal::from_f64(k as f64),
            violation: (count as f64 - k as f64).abs(),
        });
    }
    Ok(CheckReport::from_points("set_aside_reserve", points, 0.0))
}

fn mixture_components(s: u64) -> Vec<Box<dyn Sceptic + Send>> {
    vec![
        Box::new(AlphaMember::new(Role::I, alpha(0.5))),
        Box::new(RatioTracker),
        Box::new(RandomSceptic::new(s.wrapping_add(1_000_003))),
    ]
}

/// Engine capital of a three-way mixture against `Σ p_k K_k` computed from
/// separate runs of each component in the same scenario.
pub fn mixture_sweep(seed: u64, runs: u64) -> Result<CheckReport, SuiteError> {
    const WEIGHTS: [f64; 3] = [0.2, 0.3, 0.5];
    const N: usize = 100;
    let mut points = Vec::new();
    for s in seed..seed + runs {
        let play = |si: &mut dyn Sceptic| -> Result<Transcript, SuiteError> {
            let mut sii = AlphaMember::new(Role::II, alpha(-0.5));
            let mut reality = SamplingReality::new(Role::II, s);
            play_scenario(s, 3, Regime::Drift, si, &mut sii, &mut reality, N)
        };
        let mut mix = Mixture::new(mixture_components(s), WEIGHTS.to_vec())?;
        let whole = play(&mut mix)?;
        let mut parts = Vec::new();
        for mut c in mixture_components(s) {
            parts.push(play(c.as_mut())?);
        }
        for (i, r) in whole.rounds.iter().enumerate() {
            let expected: f64 = WEIGHTS.iter().zip(&parts).map(|(w, t)| w * capital(t.rounds[i].log_k_i)).sum();
            let got = capital(r.log_k_i);
            points.push(CheckPoint {
                index: r.n,
                lhs: Some(ExtReal::from_f64(got)),
                rhs: ExtReal::from_f64(expected),
                violation: (got - expected).abs() / expected.abs().max(1.0),
            });
        }
    }
    Ok(CheckReport::from_points("mixture_capital", points, FORMULA_TOLERANCE))
}

fn capital(l: LogCapital) -> f64 {
    l.capital().map_or(f64::NAN, ExtReal::value)
}

fn timid_players(seed: u64) -> Result<(impl Forecaster, impl Forecaster), SuiteError> {
    Ok(gen_forecast_pair(seed, 3, Regime::Timid { c: TIMID_C })?)
}

/// Fixed-horizon growth bounds on `c = 2` timid plays.
pub fn fixed_growth_sweep(seed: u64) -> Result<Vec<CheckReport>, SuiteError> {
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for n in FIXED_HORIZONS {
        let h = n as usize;
        for objective in [None, Some(Objective::MaxRatio)] {
            let reality = |s| -> Box<dyn Reality> {
                match objective {
                    Some(o) => Box::new(AdversarialReality::new(o)),
                    None => Box::new(SamplingReality::new(Role::I, s)),
                }
            };
            let (mut fi, mut fii) = timid_players(seed)?;
            let (mut si, mut sii) = growth_joint_fixed(n)?;
            let t = run_competitive(
                Players {
                    forecaster_i: &mut fi,
                    forecaster_ii: &mut fii,
                    sceptic_i: &mut si,
                    sceptic_ii: &mut sii,
                    reality: reality(seed).as_mut(),
                },
                h,
            )?;
            lower.push(check_growth_bounds(&t, TIMID_C, GrowthVariant::FixedLower)?);

            let opponents: [Box<dyn Sceptic>; 2] = [
                Box::new(RandomSceptic::new(seed)),
                Box::new(AlphaMember::new(Role::II, alpha(-1.0 + 2.0 / (n as f64).sqrt()))),
            ];
            for mut sii in opponents {
                let (mut fi, mut fii) = timid_players(seed)?;
                let mut si = growth_sceptic_i_fixed(n)?;
                let t = run_competitive(
                    Players {
                        forecaster_i: &mut fi,
                        forecaster_ii: &mut fii,
                        sceptic_i: &mut si,
                        sceptic_ii: sii.as_mut(),
                        reality: reality(seed).as_mut(),
                    },
                    h,
                )?;
                upper.push(check_growth_bounds(&t, TIMID_C, GrowthVariant::FixedUpper)?);
            }
        }
    }
    Ok(vec![CheckReport::combine("growth_fixed_lower", lower), CheckReport::combine("growth_fixed_upper", upper)])
}

fn as_log_series(history: &[Vec<ExtReal>], k: usize) -> Vec<LogCapital> {
    history.iter().map(|row| LogCapital::Value(row[k])).collect()
}

/// Anytime growth bounds: per-component inequalities on the component
/// capitals and penalized inequalities on the mixture capitals.
pub fn anytime_growth(seed: u64, horizon: usize) -> Result<Vec<CheckReport>, SuiteError> {
    let ks: Vec<u32> = (2..=ANYTIME_K_MAX).collect();

    let (mut fi, mut fii) = timid_players(seed)?;
    let (mut si, mut sii) = growth_joint_anytime(ANYTIME_K_MAX)?;
    let mut reality = SamplingReality::new(Role::I, seed);
    let t = run_competitive(
        Players {
            forecaster_i: &mut fi,
            forecaster_ii: &mut fii,
            sceptic_i: &mut si,
            sceptic_ii: &mut sii,
            reality: &mut reality,
        },
        horizon,
    )?;
    let mut lower = Vec::new();
    let mut lower_pen = Vec::new();
    for (j, &k) in ks.iter().enumerate() {
        let eps = anytime_epsilon(k);
        let li = as_log_series(si.history(), j);
        let lii = as_log_series(sii.history(), j);
        lower.push(check_growth_series(&t, TIMID_C, GrowthVariant::Lower { eps }, &li, &lii)?);
        lower_pen.push(check_growth_bounds(&t, TIMID_C, GrowthVariant::PenalizedLower { eps, k })?);
    }

    let (mut fi, mut fii) = timid_players(seed)?;
    let mut si = growth_sceptic_i_anytime(ANYTIME_K_MAX)?;
    let mut sii = RandomSceptic::new(seed);
    let mut reality = SamplingReality::new(Role::I, seed);
    let t = run_competitive(
        Players {
            forecaster_i: &mut fi,
            forecaster_ii: &mut fii,
            sceptic_i: &mut si,
            sceptic_ii: &mut sii,
            reality: &mut reality,
        },
        horizon,
    )?;
    let lii: Vec<LogCapital> = t.rounds.iter().map(|r| r.log_k_ii).collect();
    let mut upper = Vec::new();
    let mut upper_pen = Vec::new();
    for (j, &k) in ks.iter().enumerate() {
        let eps = anytime_epsilon(k);
        let li = as_log_series(si.history(), j);
        upper.push(check_growth_series(&t, TIMID_C, GrowthVariant::Upper { eps }, &li, &lii)?);
        upper_pen.push(check_growth_bounds(&t, TIMID_C, GrowthVariant::PenalizedUpper { eps, k })?);
    }
    Ok(vec![
        CheckReport::combine("growth_anytime_lower_components", lower),
        CheckReport::combine("growth_anytime_lower_penalized", lower_pen),
        CheckReport::combine("growth_anytime_upper_components", upper),
        CheckReport::combine("growth_anytime_upper_penalized", upper_pen),
    ])
}
