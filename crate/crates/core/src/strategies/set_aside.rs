use crate::engine::{RoundContext, Sceptic};
use crate::extmath::{ext_mul, ExtReal};
use crate::measures::BettingFunction;

/// Active capital above which one unit is moved to the reserve.
pub const SET_ASIDE_THRESHOLD: f64 = 2.0;

/// Plays `inner` with the active part of the capital and banks one unit
/// each round the active capital exceeds 2.
///
/// The transformed capital never falls below the reserve, so an inner
/// strategy whose capital is unbounded makes this one tend to infinity.
pub struct SetAside<S> {
    inner: S,
    capital: f64,
    reserve: f64,
    triggers: Vec<usize>,
    round: usize,
    last_inner: Option<BettingFunction>,
}

impl<S: Sceptic> SetAside<S> {
    pub fn new(inner: S) -> Self {
        SetAside { inner, capital: 1.0, reserve: 0.0, triggers: Vec::new(), round: 0, last_inner: None }
    }

    pub fn capital(&self) -> f64 {
        self.capital
    }

    pub fn reserve(&self) -> f64 {
        self.reserve
    }

    pub fn active(&self) -> f64 {
        self.capital - self.reserve
    }

    /// Rounds after which a unit was set aside.
    pub fn triggers(&self) -> &[usize] {
        &self.triggers
    }

    pub fn inner(&self) -> &S {
        &self.inner
    }
}

impl<S: Sceptic> Sceptic for SetAside<S> {
    fn bet(&mut self, ctx: &RoundContext<'_>) -> BettingFunction {
        let f = self.inner.bet(ctx);
        let k = self.capital;
        let bet = if k == 0.0 || !k.is_finite() {
            BettingFunction::constant_one(ctx.outcomes())
        } else {
            let share = ExtReal::from_f64(self.active() / k);
            let banked = self.reserve / k;
            let payoff = f.payoff().iter().map(|&x| {
                let v = ext_mul(share, x);
                if v.is_finite() {
                    ExtReal::from_f64(v.value() + banked)
                } else {
                    v
                }
            });
            BettingFunction::new(payoff.collect()).expect("payoffs stay nonnegative")
        };
        self.last_inner = Some(f);
        bet
    }

    fn settle(&mut self, outcome: usize) {
        self.round += 1;
        let f = self.last_inner.take().map_or(ExtReal::ONE, |f| f.at(outcome));
        if self.capital > 0.0 && self.capital.is_finite() {
            let active = ext_mul(ExtReal::from_f64(self.active()), f).value();
            self.capital = active + self.reserve;
            if active > SET_ASIDE_THRESHOLD {
                self.reserve += 1.0;
                self.triggers.push(self.round);
            }
        }
        self.inner.settle(outcome);
    }
}
