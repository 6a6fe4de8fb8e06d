//! Betting strategies for the Sceptics.

mod alpha;
mod forcer;
mod growth;
mod mixture;
mod set_aside;

pub use alpha::{alpha_pair, ratio_tracker_bet, AlphaMember, RatioTracker};
pub use forcer::{borel_cantelli_forcer, forcer_mixture, submartingale_center, EventFn, QuadraticForcer, XiSource};
pub use growth::{
    anytime_epsilon, anytime_weights, growth_joint_anytime, growth_joint_fixed, growth_sceptic_i_anytime,
    growth_sceptic_i_fixed, horizon_index, GrowthError,
};
pub use mixture::{Mixture, MixtureError, WEIGHT_TOLERANCE};
pub use set_aside::{SetAside, SET_ASIDE_THRESHOLD};

use thiserror::Error;

use crate::divergence::{AlphaParam, DivergenceError};
use crate::engine::{RoundContext, Sceptic};
use crate::measures::BettingFunction;

/// Default truncation of the countable mixtures over budgets.
pub const DEFAULT_C_MAX: u32 = 64;

/// Default truncation of the anytime mixtures.
pub const DEFAULT_K_MAX: u32 = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StrategyError {
    #[error(transparent)]
    Alpha(#[from] DivergenceError),
    #[error("{0}")]
    Precondition(String),
    #[error(transparent)]
    Mixture(#[from] MixtureError),
}

/// Always bets the fair `f ≡ 1`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ConstantSceptic;

impl Sceptic for ConstantSceptic {
    fn bet(&mut self, ctx: &RoundContext<'_>) -> BettingFunction {
        BettingFunction::constant_one(ctx.outcomes())
    }
}

/// Weight `c = 2/(1−α)` given to the power-ratio component of the
/// big-alpha strategy.
pub fn big_alpha_share(alpha: f64) -> f64 {
    2.0 / (1.0 - alpha)
}

/// Sceptic I's strategy for `α < −1`: a fraction `2/(1−α)` of the initial
/// capital on the power-ratio bet, the rest on the ratio tracker.
pub fn big_alpha_sceptic_i(alpha: f64) -> Result<Mixture, StrategyError> {
    let a = AlphaParam::new(alpha)?;
    if alpha >= -1.0 {
        return Err(StrategyError::Precondition(format!("big-alpha strategy needs alpha < -1, got {alpha}")));
    }
    let c = big_alpha_share(alpha);
    let components: Vec<Box<dyn Sceptic + Send>> = vec![Box::new(AlphaMember::solo_first(a)), Box::new(RatioTracker)];
    Ok(Mixture::new(components, vec![c, 1.0 - c])?)
}

/// Sceptic I's strategy that wins when the forecasts stay close but
/// Sceptic II gets rich: equal thirds in a forcer on the truncated
/// log-likelihood ratio, a forcer on the events `{β^I > e β^II}`, and the
/// ratio tracker.
pub fn criterion_sceptic_i(alpha: f64, c_max: u32) -> Result<Mixture, StrategyError> {
    if !(alpha > -1.0 && alpha < 1.0) {
        return Err(StrategyError::Precondition(format!("alpha must lie in (-1, 1), got {alpha}")));
    }
    if c_max == 0 {
        return Err(StrategyError::Precondition("c_max must be at least 1".into()));
    }
    let components: Vec<Box<dyn Sceptic + Send>> = vec![
        Box::new(forcer_mixture(c_max, XiSource::TruncatedLogRatio, true)?),
        Box::new(forcer_mixture(c_max, XiSource::LikelihoodJump, true)?),
        Box::new(RatioTracker),
    ];
    Ok(Mixture::new(components, vec![1.0 / 3.0; 3])?)
}
