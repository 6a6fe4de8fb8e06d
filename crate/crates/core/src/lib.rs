//! Competitive testing of probability forecasters on finite outcome spaces.
//!
//! Two Forecasters announce distributions each round, two Sceptics bet
//! against them, and Reality picks the outcome. The crate provides the
//! protocol engine, the divergences that govern the Sceptics' capitals, the
//! explicit betting strategies, seeded scenario generators and checkers that
//! evaluate the capital identities and bounds round by round.

pub mod divergence;
pub mod engine;
pub mod extmath;
pub mod measures;
pub mod scenarios;
pub mod strategies;
pub mod verify;

pub use divergence::{
    chi2_divergence, div_bracket, div_paren, hellinger_integral, kl_divergence, renyi_info_gain, AlphaParam,
    DivergenceError,
};
pub use engine::{
    EngineError, ForecastView, Forecaster, ProtocolKind, Reality, RealityView, Role, RoundContext, RoundRecord,
    Sceptic, Transcript,
};
pub use extmath::{ext_mul, pos_part, safe_ratio, truncate_at_one, ExtReal, LogCapital};
pub use measures::{
    exceptional_pair, is_absolutely_continuous, is_c_timid, mixture_densities, validate_betting, BettingFunction,
    DensityPair, Distribution, ExceptionalPair, MeasureError, OutcomeSpace,
};
