use crate::extmath::LogCapital;
use crate::measures::{exceptional_pair, mixture_densities, validate_betting, DensityPair, ExceptionalPair};

use super::{
    EngineError, ForecastView, Forecaster, ProtocolKind, Reality, RealityView, Role, RoundContext, RoundRecord,
    Sceptic, Transcript,
};

/// The five players of the competitive protocols.
pub struct Players<'a> {
    pub forecaster_i: &'a mut dyn Forecaster,
    pub forecaster_ii: &'a mut dyn Forecaster,
    pub sceptic_i: &'a mut dyn Sceptic,
    pub sceptic_ii: &'a mut dyn Sceptic,
    pub reality: &'a mut dyn Reality,
}

/// Announces the exceptional pair in the modified protocol.
pub trait ExceptionalProvider {
    fn announce(&mut self, round: usize, pair: &DensityPair) -> ExceptionalPair;
}

/// Announces the zero-density sets of the two forecasts.
#[derive(Clone, Copy, Debug, Default)]
pub struct DefaultExceptional;

impl ExceptionalProvider for DefaultExceptional {
    fn announce(&mut self, _round: usize, pair: &DensityPair) -> ExceptionalPair {
        exceptional_pair(pair)
    }
}

impl<F: FnMut(usize, &DensityPair) -> ExceptionalPair> ExceptionalProvider for F {
    fn announce(&mut self, round: usize, pair: &DensityPair) -> ExceptionalPair {
        self(round, pair)
    }
}

/// Runs the competitive testing protocol for `horizon` rounds.
pub fn run_competitive(players: Players<'_>, horizon: usize) -> Result<Transcript, EngineError> {
    run(players, None, horizon)
}

/// Runs the modified protocol, where an exceptional pair is announced before
/// the Sceptics move.
pub fn run_modified(
    players: Players<'_>,
    provider: &mut dyn ExceptionalProvider,
    horizon: usize,
) -> Result<Transcript, EngineError> {
    run(players, Some(provider), horizon)
}

fn run(
    players: Players<'_>,
    mut provider: Option<&mut dyn ExceptionalProvider>,
    horizon: usize,
) -> Result<Transcript, EngineError> {
    if horizon == 0 {
        return Err(EngineError::EmptyHorizon);
    }
    let Players { forecaster_i, forecaster_ii, sceptic_i, sceptic_ii, reality } = players;
    let kind = if provider.is_some() { ProtocolKind::Modified } else { ProtocolKind::Competitive };
    let mut rounds = Vec::with_capacity(horizon);
    let mut history = Vec::with_capacity(horizon);
    let (mut log_k_i, mut log_k_ii) = (LogCapital::ZERO, LogCapital::ZERO);

    for n in 1..=horizon {
        let p_i = forecaster_i
            .forecast(&ForecastView { round: n, first: None })
            .map_err(|source| EngineError::Forecaster { role: Role::I, round: n, source })?;
        let p_ii = forecaster_ii
            .forecast(&ForecastView { round: n, first: Some(&p_i) })
            .map_err(|source| EngineError::Forecaster { role: Role::II, round: n, source })?;
        let pair = mixture_densities(&p_i, &p_ii).map_err(|_| EngineError::DimensionMismatch { round: n })?;

        let exceptional = match provider.as_mut() {
            Some(p) => {
                let e = p.announce(n, &pair);
                if !e.is_valid_for(&p_i, &p_ii) {
                    return Err(EngineError::InvalidExceptional { round: n });
                }
                Some(e)
            }
            None => None,
        };

        let ctx_ii = RoundContext {
            round: n,
            role: Role::II,
            forecast: &p_ii,
            pair: Some(&pair),
            exceptional: exceptional.as_ref(),
            opponent_bet: None,
            xi: None,
        };
        let f_ii = sceptic_ii.bet(&ctx_ii);
        if !validate_betting(&f_ii, &p_ii) {
            return Err(EngineError::InvalidBet { role: Role::II, round: n });
        }
        let ctx_i = RoundContext {
            round: n,
            role: Role::I,
            forecast: &p_i,
            pair: Some(&pair),
            exceptional: exceptional.as_ref(),
            opponent_bet: Some(&f_ii),
            xi: None,
        };
        let f_i = sceptic_i.bet(&ctx_i);
        if !validate_betting(&f_i, &p_i) {
            return Err(EngineError::InvalidBet { role: Role::I, round: n });
        }

        let outcome = reality.outcome(&RealityView {
            round: n,
            forecast: &p_i,
            pair: Some(&pair),
            exceptional: exceptional.as_ref(),
            bet_i: &f_i,
            bet_ii: Some(&f_ii),
            history: &history,
        });
        if outcome >= pair.len() {
            return Err(EngineError::InvalidOutcome { round: n, outcome });
        }

        log_k_i = log_k_i.update(f_i.at(outcome));
        log_k_ii = log_k_ii.update(f_ii.at(outcome));
        sceptic_ii.settle(outcome);
        sceptic_i.settle(outcome);
        forecaster_i.observe(outcome);
        forecaster_ii.observe(outcome);
        history.push(outcome);

        let violation = exceptional.as_ref().map(|e| e.contains(outcome));
        rounds.push(RoundRecord { n, pair, exceptional, violation, f_i, f_ii, outcome, log_k_i, log_k_ii });
    }
    Ok(Transcript { kind, rounds })
}
