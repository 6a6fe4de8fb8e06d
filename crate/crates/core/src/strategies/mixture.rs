use thiserror::Error;

use crate::engine::{RoundContext, Sceptic};
use crate::extmath::{ext_mul, ExtReal, LogCapital};
use crate::measures::BettingFunction;

/// Absolute tolerance on the total weight of a mixture.
pub const WEIGHT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MixtureError {
    #[error("mixture needs at least one component")]
    Empty,
    #[error("got {weights} weights for {components} components")]
    LengthMismatch { weights: usize, components: usize },
    #[error("weights must be positive and sum to 1 (sum {0})")]
    WeightSum(f64),
}

/// Log-capital update with `0 · ∞ = 0`, so a component holding `∞` that
/// loses everything drops to zero instead of becoming indefinite.
fn grow(log_k: ExtReal, payoff: ExtReal) -> ExtReal {
    if payoff.is_zero() {
        ExtReal::NEG_INFINITY
    } else {
        log_k.checked_add(payoff.ln()).unwrap_or(ExtReal::NEG_INFINITY)
    }
}

/// Splits the initial capital among several strategies with fixed weights.
///
/// Each round the master bet is the capital-weighted average of the
/// components' bets, so the master capital stays `Σ p_k K_k`.
pub struct Mixture {
    components: Vec<Box<dyn Sceptic + Send>>,
    weights: Vec<f64>,
    log_caps: Vec<ExtReal>,
    last_bets: Vec<BettingFunction>,
    history: Vec<Vec<ExtReal>>,
}

impl Mixture {
    pub fn new(components: Vec<Box<dyn Sceptic + Send>>, weights: Vec<f64>) -> Result<Self, MixtureError> {
        if components.is_empty() {
            return Err(MixtureError::Empty);
        }
        if weights.len() != components.len() {
            return Err(MixtureError::LengthMismatch { weights: weights.len(), components: components.len() });
        }
        let sum: f64 = weights.iter().sum();
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) || (sum - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(MixtureError::WeightSum(sum));
        }
        let n = components.len();
        Ok(Mixture {
            components,
            weights,
            log_caps: vec![ExtReal::ZERO; n],
            last_bets: Vec::new(),
            history: Vec::new(),
        })
    }

    /// Weights proportional to `raw`, normalized here.
    pub fn proportional(components: Vec<Box<dyn Sceptic + Send>>, raw: &[f64]) -> Result<Self, MixtureError> {
        let total: f64 = raw.iter().sum();
        let weights = raw.iter().map(|w| w / total).collect();
        Mixture::new(components, weights)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Current `ln K_k` of every component.
    pub fn component_log_capitals(&self) -> &[ExtReal] {
        &self.log_caps
    }

    /// `ln K_k` after each settled round, one row per round.
    pub fn history(&self) -> &[Vec<ExtReal>] {
        &self.history
    }

    /// `ln Σ p_k K_k`.
    pub fn log_capital(&self) -> LogCapital {
        LogCapital::Value(weighted_log_sum(&self.weights, &self.log_caps))
    }

    /// Normalized weights `p_k K_k / Σ p_j K_j`; `None` when the master
    /// capital is `0` or `∞`.
    fn current_shares(&self) -> Option<Vec<f64>> {
        let terms: Vec<ExtReal> = self.weights.iter().zip(&self.log_caps).map(|(p, l)| weighted_log(*p, *l)).collect();
        let top = terms.iter().copied().fold(ExtReal::NEG_INFINITY, ExtReal::max);
        if !top.is_finite() {
            return None;
        }
        let raw: Vec<f64> = terms.iter().map(|t| (t.value() - top.value()).exp()).collect();
        let total: f64 = raw.iter().sum();
        Some(raw.into_iter().map(|x| x / total).collect())
    }
}

fn weighted_log(p: f64, l: ExtReal) -> ExtReal {
    if l.is_finite() {
        ExtReal::from_f64(p.ln() + l.value())
    } else {
        l
    }
}

/// `ln Σ p_k exp(l_k)`.
pub(crate) fn weighted_log_sum(weights: &[f64], logs: &[ExtReal]) -> ExtReal {
    let terms: Vec<ExtReal> = weights.iter().zip(logs).map(|(p, l)| weighted_log(*p, *l)).collect();
    let top = terms.iter().copied().fold(ExtReal::NEG_INFINITY, ExtReal::max);
    if !top.is_finite() {
        return top;
    }
    let s: f64 = terms.iter().map(|t| (t.value() - top.value()).exp()).sum();
    ExtReal::from_f64(top.value() + s.ln())
}

impl Sceptic for Mixture {
    fn bet(&mut self, ctx: &RoundContext<'_>) -> BettingFunction {
        let m = ctx.outcomes();
        self.last_bets = self.components.iter_mut().map(|c| c.bet(ctx)).collect();
        let Some(shares) = self.current_shares() else {
            return BettingFunction::constant_one(m);
        };
        let payoff = (0..m)
            .map(|w| {
                let mut total = 0.0;
                for (share, f) in shares.iter().zip(&self.last_bets) {
                    total += ext_mul(ExtReal::from_f64(*share), f.at(w)).value();
                }
                ExtReal::from_f64(total)
            })
            .collect();
        BettingFunction::new(payoff).expect("mixture of nonnegative bets")
    }

    fn settle(&mut self, outcome: usize) {
        for ((c, l), f) in self.components.iter_mut().zip(self.log_caps.iter_mut()).zip(&self.last_bets) {
            *l = grow(*l, f.at(outcome));
            c.settle(outcome);
        }
        self.history.push(self.log_caps.clone());
    }
}
