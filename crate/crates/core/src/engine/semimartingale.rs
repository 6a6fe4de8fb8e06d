use serde::{Deserialize, Serialize};

use crate::extmath::{ExtReal, LogCapital};
use crate::measures::{validate_betting, BettingFunction, Distribution};

use super::{EngineError, ForecastView, Forecaster, Reality, RealityView, Role, RoundContext, Sceptic};

/// Absolute slack on Reality's mean constraint.
pub const XI_MEAN_TOLERANCE: f64 = 1e-9;

/// Sign constraint on `Σ ξ p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanConstraint {
    Martingale,
    Submartingale,
    Supermartingale,
}

impl MeanConstraint {
    pub fn admits(self, mean: f64) -> bool {
        match self {
            MeanConstraint::Martingale => mean.abs() <= XI_MEAN_TOLERANCE,
            MeanConstraint::Submartingale => mean >= -XI_MEAN_TOLERANCE,
            MeanConstraint::Supermartingale => mean <= XI_MEAN_TOLERANCE,
        }
    }
}

/// How Sceptic's capital is updated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    /// `K_n = K_{n−1} f_n(ω_n)`.
    Multiplicative,
    /// `K_n = K_{n−1} + g_n(ω_n)` with `g_n = (f_n − 1) K_{n−1}`.
    Additive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemimartingaleRound {
    pub n: usize,
    pub p: Distribution,
    pub xi: Vec<f64>,
    pub f: BettingFunction,
    /// Additive bet, present in the additive representation while capital is finite.
    pub g: Option<Vec<f64>>,
    pub outcome: usize,
    pub log_k: LogCapital,
    /// Capital in linear scale as tracked by the representation.
    pub capital: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemimartingaleTranscript {
    pub constraint: MeanConstraint,
    pub representation: Representation,
    pub rounds: Vec<SemimartingaleRound>,
}

impl SemimartingaleTranscript {
    pub fn capitals(&self) -> Vec<f64> {
        self.rounds.iter().map(|r| r.capital).collect()
    }
}

/// `g(ω) = (f(ω) − 1) K_{n−1}`.
pub fn additive_from_multiplicative(f: &BettingFunction, log_k_prev: LogCapital) -> Result<Vec<f64>, EngineError> {
    let k = match log_k_prev {
        LogCapital::Value(v) if v.is_finite() => v.value().exp(),
        _ => return Err(EngineError::NonfiniteCapital),
    };
    Ok(f.payoff().iter().map(|x| (x.value() - 1.0) * k).collect())
}

/// Runs the semimartingale protocol: Forecaster, then Reality's test
/// function, then Sceptic, then the outcome.
pub fn run_semimartingale(
    forecaster: &mut dyn Forecaster,
    sceptic: &mut dyn Sceptic,
    reality: &mut dyn Reality,
    constraint: MeanConstraint,
    representation: Representation,
    horizon: usize,
) -> Result<SemimartingaleTranscript, EngineError> {
    run(forecaster, sceptic, reality, Some(constraint), representation, horizon)
}

/// Runs the testing protocol: the semimartingale protocol with `ξ ≡ 0`.
pub fn run_testing(
    forecaster: &mut dyn Forecaster,
    sceptic: &mut dyn Sceptic,
    reality: &mut dyn Reality,
    horizon: usize,
) -> Result<SemimartingaleTranscript, EngineError> {
    run(forecaster, sceptic, reality, None, Representation::Multiplicative, horizon)
}

fn run(
    forecaster: &mut dyn Forecaster,
    sceptic: &mut dyn Sceptic,
    reality: &mut dyn Reality,
    constraint: Option<MeanConstraint>,
    representation: Representation,
    horizon: usize,
) -> Result<SemimartingaleTranscript, EngineError> {
    if horizon == 0 {
        return Err(EngineError::EmptyHorizon);
    }
    let mut rounds = Vec::with_capacity(horizon);
    let mut history = Vec::with_capacity(horizon);
    let mut log_k = LogCapital::ZERO;
    let mut capital = 1.0f64;

    for n in 1..=horizon {
        let p = forecaster
            .forecast(&ForecastView { round: n, first: None })
            .map_err(|source| EngineError::Forecaster { role: Role::Solo, round: n, source })?;
        let xi = match constraint {
            Some(c) => {
                let xi = reality.test_function(n, &p);
                if xi.len() != p.len() || xi.iter().any(|x| !x.is_finite()) {
                    return Err(EngineError::InvalidXi { round: n, mean: f64::NAN });
                }
                let mean = p.expect(&xi);
                if !c.admits(mean) {
                    return Err(EngineError::InvalidXi { round: n, mean });
                }
                xi
            }
            None => vec![0.0; p.len()],
        };

        let f = sceptic.bet(&RoundContext::solo(n, &p, Some(&xi)));
        if !validate_betting(&f, &p) {
            return Err(EngineError::InvalidBet { role: Role::Solo, round: n });
        }
        let outcome = reality.outcome(&RealityView {
            round: n,
            forecast: &p,
            pair: None,
            exceptional: None,
            bet_i: &f,
            bet_ii: None,
            history: &history,
        });
        if outcome >= p.len() {
            return Err(EngineError::InvalidOutcome { round: n, outcome });
        }

        let g = match representation {
            Representation::Multiplicative => {
                log_k = log_k.update(f.at(outcome));
                capital = log_k.capital().map_or(f64::NAN, ExtReal::value);
                None
            }
            Representation::Additive => {
                if capital == 0.0 {
                    // Bankrupt: any bet scales to the zero move.
                    Some(vec![0.0; p.len()])
                } else if capital.is_finite() {
                    let g = additive_from_multiplicative(&f, log_k_of(capital))?;
                    capital = if f.at(outcome).is_pos_infinity() {
                        f64::INFINITY
                    } else {
                        // Never below zero, even after rounding.
                        (capital + g[outcome]).max(0.0)
                    };
                    log_k = log_k_of(capital);
                    Some(g)
                } else {
                    None
                }
            }
        };
        sceptic.settle(outcome);
        forecaster.observe(outcome);
        history.push(outcome);
        rounds.push(SemimartingaleRound { n, p, xi, f, g, outcome, log_k, capital });
    }
    Ok(SemimartingaleTranscript {
        constraint: constraint.unwrap_or(MeanConstraint::Martingale),
        representation,
        rounds,
    })
}

fn log_k_of(capital: f64) -> LogCapital {
    LogCapital::from_capital(ExtReal::from_f64(capital))
}
