use std::fmt;
use std::sync::Arc;

use crate::engine::{RoundContext, Sceptic};
use crate::extmath::{truncate_at_one, ExtReal};
use crate::measures::{BettingFunction, Distribution};

use super::mixture::{Mixture, MixtureError};

/// Event selector: marks the outcomes belonging to the round's event.
pub type EventFn = Arc<dyn Fn(&RoundContext<'_>) -> Vec<bool> + Send + Sync>;

/// Where a forcer takes its test function from.
#[derive(Clone)]
pub enum XiSource {
    /// Reality's announcement in the semimartingale protocol.
    Announced,
    /// `U(ln(β^I/β^II))`, truncated at 1; zero where `β^I = 0`.
    TruncatedLogRatio,
    /// Indicator of `{β^I > e β^II}`.
    LikelihoodJump,
    /// Indicator of a caller-supplied event.
    Events(EventFn),
}

impl fmt::Debug for XiSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            XiSource::Announced => write!(f, "Announced"),
            XiSource::TruncatedLogRatio => write!(f, "TruncatedLogRatio"),
            XiSource::LikelihoodJump => write!(f, "LikelihoodJump"),
            XiSource::Events(_) => write!(f, "Events(..)"),
        }
    }
}

impl XiSource {
    pub fn evaluate(&self, ctx: &RoundContext<'_>) -> Vec<f64> {
        let m = ctx.outcomes();
        match self {
            XiSource::Announced => ctx.xi.map_or_else(|| vec![0.0; m], <[f64]>::to_vec),
            XiSource::TruncatedLogRatio => match ctx.pair {
                Some(dp) => (0..m)
                    .map(|w| {
                        if dp.beta_i()[w] == 0.0 {
                            0.0
                        } else {
                            let r = dp.ratio_i_over_ii(w);
                            if r.is_pos_infinity() {
                                1.0
                            } else {
                                truncate_at_one(r.value().ln())
                            }
                        }
                    })
                    .collect(),
                None => vec![0.0; m],
            },
            XiSource::LikelihoodJump => match ctx.pair {
                Some(dp) => (0..m).map(|w| f64::from(dp.beta_i()[w] > std::f64::consts::E * dp.beta_ii()[w])).collect(),
                None => vec![0.0; m],
            },
            XiSource::Events(events) => events(ctx).into_iter().map(f64::from).collect(),
        }
    }
}

/// `ξ − Σ ξ p`.
pub fn submartingale_center(xi: &[f64], p: &Distribution) -> Vec<f64> {
    let mean = p.expect(xi);
    xi.iter().map(|x| x - mean).collect()
}

/// Quadratic forcer with budget `C`.
///
/// While the accumulated variance `V_N = Σ ∫ξ² dP` stays within `C`, the
/// capital is `1 + (S_N² − V_N)/C` with `S_N = Σ ξ_n(ω_n)`; afterwards it
/// stays frozen.
#[derive(Clone, Debug)]
pub struct QuadraticForcer {
    budget: f64,
    source: XiSource,
    center: bool,
    sum: f64,
    variance: f64,
    capital: f64,
    exhausted: bool,
    pending: Option<Pending>,
}

#[derive(Clone, Debug)]
struct Pending {
    xi: Vec<f64>,
    var: f64,
    g: Vec<f64>,
}

impl QuadraticForcer {
    pub fn new(budget: f64, source: XiSource, center: bool) -> Self {
        assert!(budget > 0.0 && budget.is_finite(), "budget must be positive");
        QuadraticForcer {
            budget,
            source,
            center,
            sum: 0.0,
            variance: 0.0,
            capital: 1.0,
            exhausted: false,
            pending: None,
        }
    }

    /// Forcer on Reality's announced test function, for the martingale protocol.
    pub fn announced(budget: f64) -> Self {
        QuadraticForcer::new(budget, XiSource::Announced, false)
    }

    pub fn capital(&self) -> f64 {
        self.capital
    }

    pub fn running_sum(&self) -> f64 {
        self.sum
    }

    pub fn running_variance(&self) -> f64 {
        self.variance
    }

    pub fn is_exhausted(&self) -> bool {
        self.exhausted
    }

    /// `1 + (S² − V)/C`.
    pub fn closed_form(&self) -> f64 {
        1.0 + (self.sum * self.sum - self.variance) / self.budget
    }
}

impl Sceptic for QuadraticForcer {
    fn bet(&mut self, ctx: &RoundContext<'_>) -> BettingFunction {
        let m = ctx.outcomes();
        self.pending = None;
        if self.exhausted {
            return BettingFunction::constant_one(m);
        }
        let p = ctx.forecast;
        let raw = self.source.evaluate(ctx);
        let xi = if self.center { submartingale_center(&raw, p) } else { raw };
        let var: f64 = xi.iter().zip(p.probs()).map(|(x, q)| x * x * q).sum();
        if self.variance + var > self.budget {
            self.exhausted = true;
            return BettingFunction::constant_one(m);
        }
        let g: Vec<f64> = xi.iter().map(|x| (2.0 * self.sum * x + x * x - var) / self.budget).collect();
        let bet = if self.capital > 0.0 {
            let k = self.capital;
            BettingFunction::new(g.iter().map(|gw| ExtReal::from_f64((1.0 + gw / k).max(0.0))).collect())
                .expect("clamped payoffs")
        } else {
            BettingFunction::constant_one(m)
        };
        self.pending = Some(Pending { xi, var, g });
        bet
    }

    fn settle(&mut self, outcome: usize) {
        if let Some(Pending { xi, var, g }) = self.pending.take() {
            if self.capital > 0.0 {
                self.capital = (self.capital + g[outcome]).max(0.0);
            }
            self.sum += xi[outcome];
            self.variance += var;
        }
    }
}

/// Mixture of `QuadraticForcer`s over budgets `C = 1..=c_max` with weights
/// proportional to `C^{-2}`.
pub fn forcer_mixture(c_max: u32, source: XiSource, center: bool) -> Result<Mixture, MixtureError> {
    let budgets: Vec<f64> = (1..=c_max).map(f64::from).collect();
    let components = budgets
        .iter()
        .map(|&c| Box::new(QuadraticForcer::new(c, source.clone(), center)) as Box<dyn Sceptic + Send>)
        .collect();
    let raw: Vec<f64> = budgets.iter().map(|c| c.powi(-2)).collect();
    Mixture::proportional(components, &raw)
}

/// Forcing strategy for a sequence of events: quadratic forcers on the
/// centered indicators, mixed over budgets.
pub fn borel_cantelli_forcer(c_max: u32, events: EventFn) -> Result<Mixture, MixtureError> {
    forcer_mixture(c_max, XiSource::Events(events), true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Role;
    use crate::measures::mixture_densities;
    use approx::assert_abs_diff_eq;

    fn solo<'a>(p: &'a Distribution, xi: &'a [f64]) -> RoundContext<'a> {
        RoundContext::solo(1, p, Some(xi))
    }

    #[test]
    fn centering() {
        let p = Distribution::uniform(2).unwrap();
        assert_eq!(submartingale_center(&[1.0, 0.0], &p), vec![0.5, -0.5]);
        assert_eq!(submartingale_center(&[1.0, -1.0], &p), vec![1.0, -1.0]);
        let p = Distribution::new(vec![0.1, 0.9]).unwrap();
        let c = submartingale_center(&[1.0, 0.0], &p);
        assert_abs_diff_eq!(c[0], 0.9, epsilon = 1e-15);
        assert_abs_diff_eq!(c[1], -0.1, epsilon = 1e-15);
    }

    #[test]
    fn budget_ten_binary_walk() {
        let p = Distribution::uniform(2).unwrap();
        let xi = [1.0, -1.0];
        let mut s = QuadraticForcer::announced(10.0);
        let mut caps = vec![];
        for w in [0, 0, 1] {
            let f = s.bet(&solo(&p, &xi));
            s.settle(w);
            caps.push(s.capital());
            assert!(crate::measures::validate_betting(&f, &p));
            assert_abs_diff_eq!(s.capital(), s.closed_form(), epsilon = 1e-12);
        }
        assert_abs_diff_eq!(caps[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(caps[1], 1.2, epsilon = 1e-12);
        assert_abs_diff_eq!(caps[2], 0.8, epsilon = 1e-12);
    }

    #[test]
    fn zero_test_function_is_inert() {
        let p = Distribution::uniform(3).unwrap();
        let mut s = QuadraticForcer::announced(1.0);
        for w in 0..3 {
            assert_eq!(s.bet(&solo(&p, &[0.0; 3])), BettingFunction::constant_one(3));
            s.settle(w);
        }
        assert_eq!(s.capital(), 1.0);
    }

    #[test]
    fn budget_exhaustion_freezes_capital() {
        let p = Distribution::uniform(2).unwrap();
        let mut s = QuadraticForcer::announced(2.0);
        for w in [0, 0] {
            s.bet(&solo(&p, &[1.0, -1.0]));
            s.settle(w);
        }
        let k = s.capital();
        assert_abs_diff_eq!(k, 2.0, epsilon = 1e-12);
        assert_eq!(s.bet(&solo(&p, &[1.0, -1.0])), BettingFunction::constant_one(2));
        s.settle(1);
        assert!(s.is_exhausted());
        assert_eq!(s.capital(), k);
    }

    #[test]
    fn rare_event_never_happening() {
        let p = Distribution::new(vec![0.01, 0.99]).unwrap();
        let events: EventFn = Arc::new(|_: &RoundContext<'_>| vec![true, false]);
        let mut s = QuadraticForcer::new(1.0, XiSource::Events(events), true);
        for _ in 0..50 {
            s.bet(&RoundContext::solo(1, &p, None));
            s.settle(1);
        }
        assert_abs_diff_eq!(s.capital(), 0.755, epsilon = 1e-12);
    }

    #[test]
    fn rare_event_always_happening() {
        let p = Distribution::new(vec![0.01, 0.99]).unwrap();
        let events: EventFn = Arc::new(|_: &RoundContext<'_>| vec![true, false]);
        let c = 100.0;
        let mut s = QuadraticForcer::new(c, XiSource::Events(events), true);
        for n in 1..=5 {
            s.bet(&RoundContext::solo(n, &p, None));
            s.settle(0);
            let n = n as f64;
            let expected = 1.0 + (0.99 * n).powi(2) / c - 0.0099 * n / c;
            assert_abs_diff_eq!(s.capital(), expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn empty_events_keep_capital() {
        let p = Distribution::uniform(2).unwrap();
        let events: EventFn = Arc::new(|ctx: &RoundContext<'_>| vec![false; ctx.outcomes()]);
        let mut mix = borel_cantelli_forcer(8, events).unwrap();
        for w in [0, 1, 1] {
            let f = mix.bet(&RoundContext::solo(1, &p, None));
            assert!(f.payoff().iter().all(|x| (x.value() - 1.0).abs() <= 1e-15));
            mix.settle(w);
        }
        assert_abs_diff_eq!(mix.log_capital().value().unwrap().value(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn pair_derived_sources() {
        let dp = mixture_densities(
            &Distribution::new(vec![0.5, 0.3, 0.2, 0.0]).unwrap(),
            &Distribution::new(vec![0.1, 0.3, 0.0, 1.0 - 0.4]).unwrap(),
        )
        .unwrap();
        let ctx = RoundContext {
            round: 1,
            role: Role::I,
            forecast: dp.p_i(),
            pair: Some(&dp),
            exceptional: None,
            opponent_bet: None,
            xi: None,
        };
        let u = XiSource::TruncatedLogRatio.evaluate(&ctx);
        assert_eq!(u, vec![1.0, 0.0, 1.0, 0.0]);
        let jump = XiSource::LikelihoodJump.evaluate(&ctx);
        assert_eq!(jump, vec![1.0, 0.0, 1.0, 0.0]);
    }
}
