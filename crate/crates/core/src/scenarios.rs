//! Seeded Forecasters, Realities and random Sceptics.
//!
//! Every player draws from its own ChaCha stream derived from the scenario
//! seed, so changing one player's consumption never perturbs another's.

use std::fmt;
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution as _;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{ForecastView, Forecaster, PlayerError, Reality, RealityView, Role, RoundContext, Sceptic};
use crate::extmath::{safe_ratio, ExtReal};
use crate::measures::{is_c_timid, mixture_densities, BettingFunction, Distribution};

/// Smallest probability assigned on an interior draw.
pub const INTERIOR_FLOOR: f64 = 1e-6;

/// Redraws allowed before a timid pair is declared infeasible.
pub const MAX_TIMID_ATTEMPTS: usize = 1000;

const STREAM_FIRST: u64 = 0;
const STREAM_SECOND: u64 = 1;
const STREAM_REALITY: u64 = 2;
const STREAM_SCEPTIC: u64 = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("outcome space needs at least 2 outcomes, got {0}")]
    TooFewOutcomes(usize),
    #[error("timidity constant must exceed 1, got {0}")]
    BadTimidity(f64),
    #[error("no {c}-timid forecast found after {attempts} draws")]
    GenerationFailed { c: f64, attempts: usize },
    #[error("unknown {kind} '{name}'")]
    Unknown { kind: &'static str, name: String },
}

/// Independent generator for one player.
pub fn player_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform draw from the simplex over `support`, with entries floored at
/// [`INTERIOR_FLOOR`] on the support and zero elsewhere.
pub fn sample_simplex<R: Rng + ?Sized>(rng: &mut R, m: usize, support: &[usize]) -> Distribution {
    let mut probs = vec![0.0; m];
    for &w in support {
        let x: f64 = rng.sample(Exp1);
        probs[w] = x;
    }
    let total: f64 = probs.iter().sum();
    for &w in support {
        probs[w] = (probs[w] / total).max(INTERIOR_FLOOR);
    }
    let total: f64 = probs.iter().sum();
    Distribution::new(probs.iter().map(|p| p / total).collect()).expect("normalized draw")
}

/// How the two forecasts relate to each other.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Forecaster II copies Forecaster I.
    Agree,
    /// Independent interior forecasts.
    Drift,
    /// Disjoint supports.
    Singular,
    /// Forecaster II rules out one outcome that Forecaster I charges.
    ZeroMixed,
    /// Forecaster II stays within a factor `c` of Forecaster I.
    Timid { c: f64 },
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::Agree => write!(f, "agree"),
            Regime::Drift => write!(f, "drift"),
            Regime::Singular => write!(f, "singular"),
            Regime::ZeroMixed => write!(f, "zero_mixed"),
            Regime::Timid { c } => write!(f, "timid(c={c})"),
        }
    }
}

impl FromStr for Regime {
    type Err = ScenarioError;

    /// Parses the parameterless regimes.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "agree" => Ok(Regime::Agree),
            "drift" => Ok(Regime::Drift),
            "singular" => Ok(Regime::Singular),
            "zero_mixed" => Ok(Regime::ZeroMixed),
            _ => Err(ScenarioError::Unknown { kind: "regime", name: s.to_string() }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum FirstKind {
    Interior,
    Partial,
}

/// Forecaster I of a generated scenario.
#[derive(Clone, Debug)]
pub struct FirstForecaster {
    rng: ChaCha8Rng,
    m: usize,
    kind: FirstKind,
}

impl Forecaster for FirstForecaster {
    fn forecast(&mut self, _view: &ForecastView<'_>) -> Result<Distribution, PlayerError> {
        let support: Vec<usize> = match self.kind {
            FirstKind::Interior => (0..self.m).collect(),
            FirstKind::Partial => {
                // Random nonempty proper subset.
                let size = self.rng.random_range(1..self.m);
                let mut all: Vec<usize> = (0..self.m).collect();
                for i in 0..size {
                    let j = self.rng.random_range(i..self.m);
                    all.swap(i, j);
                }
                let mut s = all[..size].to_vec();
                s.sort_unstable();
                s
            }
        };
        Ok(sample_simplex(&mut self.rng, self.m, &support))
    }
}

/// Forecaster II of a generated scenario; reacts to Forecaster I.
#[derive(Clone, Debug)]
pub struct SecondForecaster {
    rng: ChaCha8Rng,
    m: usize,
    regime: Regime,
}

impl SecondForecaster {
    fn timid(&mut self, p: &Distribution, c: f64) -> Result<Distribution, PlayerError> {
        let (lo, hi) = (c.powf(-0.5), c.powf(0.5));
        for _ in 0..MAX_TIMID_ATTEMPTS {
            let scaled: Vec<f64> = p.probs().iter().map(|x| x * self.rng.random_range(lo..=hi)).collect();
            let total: f64 = scaled.iter().sum();
            let candidate = Distribution::new(scaled.iter().map(|x| x / total).collect())
                .map_err(|e| PlayerError(e.to_string()))?;
            let dp = mixture_densities(p, &candidate).map_err(|e| PlayerError(e.to_string()))?;
            if is_c_timid(&dp, c) {
                return Ok(candidate);
            }
        }
        Err(PlayerError(ScenarioError::GenerationFailed { c, attempts: MAX_TIMID_ATTEMPTS }.to_string()))
    }
}

impl Forecaster for SecondForecaster {
    fn forecast(&mut self, view: &ForecastView<'_>) -> Result<Distribution, PlayerError> {
        let m = self.m;
        let first = view.first.ok_or_else(|| PlayerError("Forecaster II needs Forecaster I's move".into()))?;
        match self.regime {
            Regime::Agree => Ok(first.clone()),
            Regime::Drift => Ok(sample_simplex(&mut self.rng, m, &(0..m).collect::<Vec<_>>())),
            Regime::Singular => {
                let complement: Vec<usize> = (0..m).filter(|&w| first.prob(w) == 0.0).collect();
                Ok(sample_simplex(&mut self.rng, m, &complement))
            }
            Regime::ZeroMixed => {
                let hole = self.rng.random_range(0..m);
                let support: Vec<usize> = (0..m).filter(|&w| w != hole).collect();
                Ok(sample_simplex(&mut self.rng, m, &support))
            }
            Regime::Timid { c } => self.timid(first, c),
        }
    }
}

/// The two Forecasters of a seeded scenario.
pub fn gen_forecast_pair(
    seed: u64,
    m: usize,
    regime: Regime,
) -> Result<(FirstForecaster, SecondForecaster), ScenarioError> {
    if m < 2 {
        return Err(ScenarioError::TooFewOutcomes(m));
    }
    if let Regime::Timid { c } = regime {
        if !(c > 1.0 && c.is_finite()) {
            return Err(ScenarioError::BadTimidity(c));
        }
    }
    let kind = if regime == Regime::Singular { FirstKind::Partial } else { FirstKind::Interior };
    Ok((
        FirstForecaster { rng: player_rng(seed, STREAM_FIRST), m, kind },
        SecondForecaster { rng: player_rng(seed, STREAM_SECOND), m, regime },
    ))
}

/// Forecasters whose densities stay within a factor `c` of each other.
pub fn gen_timid_pair(seed: u64, m: usize, c: f64) -> Result<(FirstForecaster, SecondForecaster), ScenarioError> {
    gen_forecast_pair(seed, m, Regime::Timid { c })
}

/// Reality drawing the outcome from one Forecaster's distribution.
#[derive(Clone, Debug)]
pub struct SamplingReality {
    source: Role,
    rng: ChaCha8Rng,
}

impl SamplingReality {
    pub fn new(source: Role, seed: u64) -> Self {
        SamplingReality { source, rng: player_rng(seed, STREAM_REALITY) }
    }
}

impl Reality for SamplingReality {
    fn outcome(&mut self, view: &RealityView<'_>) -> usize {
        let p = match (self.source, view.pair) {
            (Role::II, Some(dp)) => dp.p_ii(),
            _ => view.forecast,
        };
        WeightedIndex::new(p.probs()).expect("distribution has mass").sample(&mut self.rng)
    }
}

/// What an adversarial Reality optimizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Outcome maximizing `β^I/β^II`.
    MaxRatio,
    /// Outcome minimizing `β^I/β^II`.
    MinRatio,
    /// Outcome minimizing Sceptic I's payoff.
    MinPayoff,
    Fixed(usize),
}

/// Deterministic Reality choosing the outcome that optimizes an objective
/// over the outcomes charged by either forecast; ties go to the lowest index.
#[derive(Clone, Copy, Debug)]
pub struct AdversarialReality {
    objective: Objective,
}

impl AdversarialReality {
    pub fn new(objective: Objective) -> Self {
        AdversarialReality { objective }
    }
}

fn arg_best(candidates: impl Iterator<Item = (usize, ExtReal)>, maximize: bool) -> Option<usize> {
    let mut best: Option<(usize, ExtReal)> = None;
    for (w, v) in candidates {
        let better = match best {
            None => true,
            Some((_, b)) => {
                if maximize {
                    v.total_cmp(&b).is_gt()
                } else {
                    v.total_cmp(&b).is_lt()
                }
            }
        };
        if better {
            best = Some((w, v));
        }
    }
    best.map(|(w, _)| w)
}

impl Reality for AdversarialReality {
    fn outcome(&mut self, view: &RealityView<'_>) -> usize {
        let support: Vec<usize> = match view.pair {
            Some(dp) => (0..dp.len()).filter(|&w| dp.in_support(w)).collect(),
            None => view.forecast.support().collect(),
        };
        let pick = match (self.objective, view.pair) {
            (Objective::Fixed(w), _) => Some(w),
            (Objective::MaxRatio, Some(dp)) => {
                arg_best(support.iter().map(|&w| (w, safe_ratio(dp.beta_i()[w], dp.beta_ii()[w]))), true)
            }
            (Objective::MinRatio, Some(dp)) => {
                arg_best(support.iter().map(|&w| (w, safe_ratio(dp.beta_i()[w], dp.beta_ii()[w]))), false)
            }
            (Objective::MinPayoff, _) => arg_best(support.iter().map(|&w| (w, view.bet_i.at(w))), false),
            (_, None) => None,
        };
        pick.or_else(|| support.first().copied()).unwrap_or(0)
    }
}

/// Reality for the semimartingale protocol: announces a random test
/// function centered under the forecast and samples the outcome from it.
#[derive(Clone, Debug)]
pub struct MartingaleReality {
    rng: ChaCha8Rng,
    scale: f64,
}

impl MartingaleReality {
    pub fn new(seed: u64, scale: f64) -> Self {
        MartingaleReality { rng: player_rng(seed, STREAM_REALITY), scale }
    }
}

impl Reality for MartingaleReality {
    fn test_function(&mut self, _round: usize, p: &Distribution) -> Vec<f64> {
        let raw: Vec<f64> = (0..p.len()).map(|_| self.rng.random_range(-self.scale..=self.scale)).collect();
        let mean = p.expect(&raw);
        raw.iter().map(|x| x - mean).collect()
    }

    fn outcome(&mut self, view: &RealityView<'_>) -> usize {
        WeightedIndex::new(view.forecast.probs()).expect("distribution has mass").sample(&mut self.rng)
    }
}

/// Sceptic making random fair bets, with `∞` on some null outcomes.
#[derive(Clone, Debug)]
pub struct RandomSceptic {
    rng: ChaCha8Rng,
}

impl RandomSceptic {
    pub fn new(seed: u64) -> Self {
        RandomSceptic { rng: player_rng(seed, STREAM_SCEPTIC) }
    }
}

impl Sceptic for RandomSceptic {
    fn bet(&mut self, ctx: &RoundContext<'_>) -> BettingFunction {
        let p = ctx.forecast;
        // Heavy-ish tails: an exponential raised to a random power.
        let raw: Vec<f64> = (0..p.len())
            .map(|_| {
                let x: f64 = self.rng.sample(Exp1);
                x.powf(self.rng.random_range(0.5..3.0))
            })
            .collect();
        let mean = p.expect(&raw);
        let payoff = (0..p.len())
            .map(|w| {
                if p.prob(w) > 0.0 {
                    ExtReal::from_f64(raw[w] / mean)
                } else if self.rng.random_bool(0.5) {
                    ExtReal::INFINITY
                } else {
                    ExtReal::from_f64(raw[w])
                }
            })
            .collect();
        BettingFunction::new(payoff).expect("random bets are nonnegative")
    }
}
