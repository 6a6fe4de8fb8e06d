//! Protocol runners: move order, bet validation and capital bookkeeping.

mod competitive;
mod semimartingale;

pub use competitive::{run_competitive, run_modified, DefaultExceptional, ExceptionalProvider, Players};
pub use semimartingale::{
    additive_from_multiplicative, run_semimartingale, run_testing, MeanConstraint, Representation, SemimartingaleRound,
    SemimartingaleTranscript,
};

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extmath::LogCapital;
use crate::measures::{BettingFunction, DensityPair, Distribution, ExceptionalPair};

/// Which Sceptic (or Forecaster) a move belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    I,
    II,
    /// The single Sceptic of the testing and semimartingale protocols.
    Solo,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::I => write!(f, "I"),
            Role::II => write!(f, "II"),
            Role::Solo => write!(f, "solo"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("{0}")]
pub struct PlayerError(pub String);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("horizon must be at least 1")]
    EmptyHorizon,
    #[error("Sceptic {role} made an invalid bet in round {round}")]
    InvalidBet { role: Role, round: usize },
    #[error("invalid exceptional pair announced in round {round}")]
    InvalidExceptional { round: usize },
    #[error("test function violates the mean constraint in round {round} (mean {mean})")]
    InvalidXi { round: usize, mean: f64 },
    #[error("capital is not finite")]
    NonfiniteCapital,
    #[error("outcome {outcome} out of range in round {round}")]
    InvalidOutcome { round: usize, outcome: usize },
    #[error("Forecaster {role} failed in round {round}: {source}")]
    Forecaster { role: Role, round: usize, source: PlayerError },
    #[error("forecasts disagree on the outcome space in round {round}")]
    DimensionMismatch { round: usize },
}

/// What a Forecaster sees when it moves.
#[derive(Clone, Copy, Debug)]
pub struct ForecastView<'a> {
    pub round: usize,
    /// Forecaster I's announcement, visible to Forecaster II.
    pub first: Option<&'a Distribution>,
}

pub trait Forecaster {
    fn forecast(&mut self, view: &ForecastView<'_>) -> Result<Distribution, PlayerError>;

    fn observe(&mut self, _outcome: usize) {}
}

impl<T: Forecaster + ?Sized> Forecaster for Box<T> {
    fn forecast(&mut self, view: &ForecastView<'_>) -> Result<Distribution, PlayerError> {
        (**self).forecast(view)
    }

    fn observe(&mut self, outcome: usize) {
        (**self).observe(outcome)
    }
}

/// Forecaster repeating one distribution.
#[derive(Clone, Debug)]
pub struct FixedForecaster(pub Distribution);

impl Forecaster for FixedForecaster {
    fn forecast(&mut self, _view: &ForecastView<'_>) -> Result<Distribution, PlayerError> {
        Ok(self.0.clone())
    }
}

/// Forecaster replaying a list, cycling when exhausted.
#[derive(Clone, Debug)]
pub struct SequenceForecaster {
    seq: Vec<Distribution>,
}

impl SequenceForecaster {
    pub fn new(seq: Vec<Distribution>) -> Self {
        assert!(!seq.is_empty(), "sequence forecaster needs at least one forecast");
        SequenceForecaster { seq }
    }
}

impl Forecaster for SequenceForecaster {
    fn forecast(&mut self, view: &ForecastView<'_>) -> Result<Distribution, PlayerError> {
        Ok(self.seq[(view.round - 1) % self.seq.len()].clone())
    }
}

/// Everything a Sceptic may look at before betting.
#[derive(Clone, Copy, Debug)]
pub struct RoundContext<'a> {
    pub round: usize,
    pub role: Role,
    /// The distribution this Sceptic's bet must be fair against.
    pub forecast: &'a Distribution,
    pub pair: Option<&'a DensityPair>,
    pub exceptional: Option<&'a ExceptionalPair>,
    /// Sceptic II's bet, shown to Sceptic I.
    pub opponent_bet: Option<&'a BettingFunction>,
    /// Reality's test function in the semimartingale protocol.
    pub xi: Option<&'a [f64]>,
}

impl<'a> RoundContext<'a> {
    pub fn outcomes(&self) -> usize {
        self.forecast.len()
    }

    /// Context for a single-Sceptic protocol.
    pub fn solo(round: usize, forecast: &'a Distribution, xi: Option<&'a [f64]>) -> Self {
        RoundContext { round, role: Role::Solo, forecast, pair: None, exceptional: None, opponent_bet: None, xi }
    }
}

pub trait Sceptic {
    fn bet(&mut self, ctx: &RoundContext<'_>) -> BettingFunction;

    /// Called with the realized outcome after every round.
    fn settle(&mut self, _outcome: usize) {}
}

impl<T: Sceptic + ?Sized> Sceptic for Box<T> {
    fn bet(&mut self, ctx: &RoundContext<'_>) -> BettingFunction {
        (**self).bet(ctx)
    }

    fn settle(&mut self, outcome: usize) {
        (**self).settle(outcome)
    }
}

/// What Reality sees when choosing the outcome.
#[derive(Clone, Copy, Debug)]
pub struct RealityView<'a> {
    pub round: usize,
    /// Forecaster I's distribution, or the single Forecaster's.
    pub forecast: &'a Distribution,
    pub pair: Option<&'a DensityPair>,
    pub exceptional: Option<&'a ExceptionalPair>,
    pub bet_i: &'a BettingFunction,
    pub bet_ii: Option<&'a BettingFunction>,
    /// Outcomes of the earlier rounds.
    pub history: &'a [usize],
}

pub trait Reality {
    /// Test function announced in the semimartingale protocol.
    fn test_function(&mut self, _round: usize, p: &Distribution) -> Vec<f64> {
        vec![0.0; p.len()]
    }

    fn outcome(&mut self, view: &RealityView<'_>) -> usize;
}

impl<T: Reality + ?Sized> Reality for Box<T> {
    fn test_function(&mut self, round: usize, p: &Distribution) -> Vec<f64> {
        (**self).test_function(round, p)
    }

    fn outcome(&mut self, view: &RealityView<'_>) -> usize {
        (**self).outcome(view)
    }
}

/// Reality replaying a fixed outcome list, cycling when exhausted.
#[derive(Clone, Debug)]
pub struct ScriptedReality {
    outcomes: Vec<usize>,
}

impl ScriptedReality {
    pub fn new(outcomes: Vec<usize>) -> Self {
        assert!(!outcomes.is_empty(), "scripted reality needs at least one outcome");
        ScriptedReality { outcomes }
    }
}

impl Reality for ScriptedReality {
    fn outcome(&mut self, view: &RealityView<'_>) -> usize {
        self.outcomes[(view.round - 1) % self.outcomes.len()]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolKind {
    Competitive,
    Modified,
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProtocolKind::Competitive => write!(f, "competitive"),
            ProtocolKind::Modified => write!(f, "modified"),
        }
    }
}

/// One round of a two-Forecaster protocol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub n: usize,
    pub pair: DensityPair,
    pub exceptional: Option<ExceptionalPair>,
    /// Whether `ω_n` fell in `E^I ∪ E^II` (modified protocol only).
    pub violation: Option<bool>,
    pub f_i: BettingFunction,
    pub f_ii: BettingFunction,
    pub outcome: usize,
    pub log_k_i: LogCapital,
    pub log_k_ii: LogCapital,
}

impl RoundRecord {
    pub fn p_i(&self) -> &Distribution {
        self.pair.p_i()
    }

    pub fn p_ii(&self) -> &Distribution {
        self.pair.p_ii()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub kind: ProtocolKind,
    pub rounds: Vec<RoundRecord>,
}

impl Transcript {
    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    pub fn final_capitals(&self) -> (LogCapital, LogCapital) {
        self.rounds.last().map(|r| (r.log_k_i, r.log_k_ii)).unwrap_or((LogCapital::ZERO, LogCapital::ZERO))
    }

    pub fn outcomes(&self) -> Vec<usize> {
        self.rounds.iter().map(|r| r.outcome).collect()
    }
}
