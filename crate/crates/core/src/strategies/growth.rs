use thiserror::Error;

use crate::divergence::AlphaParam;
use crate::engine::{Role, Sceptic};

use super::alpha::{alpha_pair, AlphaMember};
use super::mixture::Mixture;
use super::{big_alpha_sceptic_i, StrategyError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GrowthError {
    #[error("horizon must be at least {min}, got {got}")]
    Horizon { min: u64, got: u64 },
    #[error("k_max must be at least 2, got {0}")]
    KMax(u32),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
}

/// `ε_k = √(ln k / e^k)`.
pub fn anytime_epsilon(k: u32) -> f64 {
    ((k as f64).ln() / (k as f64).exp()).sqrt()
}

/// Weights `∝ k^{-2}` over `k = 2..=k_max`.
pub fn anytime_weights(k_max: u32) -> Vec<f64> {
    let raw: Vec<f64> = (2..=k_max).map(|k| (k as f64).powi(-2)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// `⌈ln N⌉`, the mixture component matched to horizon `N`.
pub fn horizon_index(n: u64) -> u32 {
    (n as f64).ln().ceil() as u32
}

fn check_k_max(k_max: u32) -> Result<(), GrowthError> {
    if k_max < 2 {
        return Err(GrowthError::KMax(k_max));
    }
    Ok(())
}

/// Joint pair of order `α = −1 + 2/√N` for a horizon known in advance.
pub fn growth_joint_fixed(n: u64) -> Result<(AlphaMember, AlphaMember), GrowthError> {
    if n < 2 {
        return Err(GrowthError::Horizon { min: 2, got: n });
    }
    let alpha = AlphaParam::new(-1.0 + 2.0 / (n as f64).sqrt()).map_err(StrategyError::from)?;
    Ok(alpha_pair(alpha))
}

/// Sceptic I's big-alpha strategy of order `α = −1 − 2/√N`.
pub fn growth_sceptic_i_fixed(n: u64) -> Result<Mixture, GrowthError> {
    if n < 1 {
        return Err(GrowthError::Horizon { min: 1, got: n });
    }
    Ok(big_alpha_sceptic_i(-1.0 - 2.0 / (n as f64).sqrt())?)
}

/// Joint strategy for an unknown horizon: both Sceptics mix the pairs of
/// order `−1 + 2ε_k`, `k = 2..=k_max`, with the same weights `∝ k^{-2}`.
pub fn growth_joint_anytime(k_max: u32) -> Result<(Mixture, Mixture), GrowthError> {
    check_k_max(k_max)?;
    let weights = anytime_weights(k_max);
    let mut first: Vec<Box<dyn Sceptic + Send>> = Vec::new();
    let mut second: Vec<Box<dyn Sceptic + Send>> = Vec::new();
    for k in 2..=k_max {
        let alpha = AlphaParam::new(-1.0 + 2.0 * anytime_epsilon(k)).map_err(StrategyError::from)?;
        first.push(Box::new(AlphaMember::new(Role::I, alpha)));
        second.push(Box::new(AlphaMember::new(Role::II, alpha)));
    }
    let mix = |c| Mixture::new(c, weights.clone()).map_err(StrategyError::from);
    Ok((mix(first)?, mix(second)?))
}

/// Sceptic I's anytime strategy: big-alpha strategies of order
/// `−1 − 2ε_k` mixed with weights `∝ k^{-2}`.
pub fn growth_sceptic_i_anytime(k_max: u32) -> Result<Mixture, GrowthError> {
    check_k_max(k_max)?;
    let mut components: Vec<Box<dyn Sceptic + Send>> = Vec::new();
    for k in 2..=k_max {
        components.push(Box::new(big_alpha_sceptic_i(-1.0 - 2.0 * anytime_epsilon(k))?));
    }
    Ok(Mixture::new(components, anytime_weights(k_max)).map_err(StrategyError::from)?)
}
