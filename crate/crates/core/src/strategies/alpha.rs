use crate::divergence::{hellinger_integral, AlphaParam};
use crate::engine::{Role, RoundContext, Sceptic};
use crate::extmath::{ext_mul, ExtReal};
use crate::measures::{BettingFunction, DensityPair};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    /// Member of the joint pair, with the singular and stopping rules.
    Joint,
    /// Sceptic I's half of the big-alpha mixture, playing alone.
    Solo,
}

/// One member of the power-ratio pair of order `α`.
///
/// Sceptic I bets `(β^II/β^I)^{(1+α)/2} / H` and Sceptic II bets
/// `(β^I/β^II)^{(1−α)/2} / H`, where `H` is the Hellinger integral.
#[derive(Clone, Debug)]
pub struct AlphaMember {
    role: Role,
    alpha: AlphaParam,
    mode: Mode,
    stopped: bool,
    /// Outcomes that end play if realized this round.
    stop_on: Vec<usize>,
}

impl AlphaMember {
    pub fn new(role: Role, alpha: AlphaParam) -> Self {
        assert!(role != Role::Solo, "a pair member plays as Sceptic I or II");
        AlphaMember { role, alpha, mode: Mode::Joint, stopped: false, stop_on: Vec::new() }
    }

    /// Sceptic I's component of the big-alpha strategy: no stopping rule,
    /// `∞` wherever `β^I = 0`, and the fair bet once `H = ∞`.
    pub fn solo_first(alpha: AlphaParam) -> Self {
        AlphaMember { role: Role::I, alpha, mode: Mode::Solo, stopped: false, stop_on: Vec::new() }
    }

    pub fn alpha(&self) -> AlphaParam {
        self.alpha
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn is_stopped(&self) -> bool {
        self.stopped
    }

    fn formula(&self, dp: &DensityPair, h: f64) -> Vec<ExtReal> {
        let inv_h = ExtReal::from_f64(1.0 / h);
        (0..dp.len())
            .map(|w| match self.role {
                Role::I => {
                    if self.mode == Mode::Solo && dp.in_support(w) && dp.beta_i()[w] == 0.0 {
                        ExtReal::INFINITY
                    } else {
                        ext_mul(dp.ratio_ii_over_i(w).powf(self.alpha.exponent_ii()), inv_h)
                    }
                }
                _ => ext_mul(dp.ratio_i_over_ii(w).powf(self.alpha.exponent_i()), inv_h),
            })
            .collect()
    }

    /// Both forecasts disagree on every charged outcome.
    fn singular(&self, dp: &DensityPair) -> Vec<ExtReal> {
        let e = dp.zero_i();
        (0..dp.len())
            .map(|w| {
                let in_e = e.contains(&w);
                match (self.role, in_e) {
                    (Role::I, true) | (Role::II, false) => ExtReal::INFINITY,
                    _ => ExtReal::ONE,
                }
            })
            .collect()
    }

    /// `H = ∞`: one forecast charges an outcome the other rules out. The
    /// Sceptic whose forecast is null there stakes everything on it.
    fn infinite_integral(&self, dp: &DensityPair) -> Vec<ExtReal> {
        // α > 1 blows up on {β^I = 0}, α < −1 on {β^II = 0}.
        let (set, null_role) = if self.alpha.value() > 1.0 { (dp.zero_i(), Role::I) } else { (dp.zero_ii(), Role::II) };
        let charged = if null_role == Role::I { dp.p_ii() } else { dp.p_i() };
        let mass = charged.mass(set);
        (0..dp.len())
            .map(|w| {
                let in_set = set.contains(&w);
                if self.role == null_role {
                    if in_set {
                        ExtReal::INFINITY
                    } else {
                        ExtReal::ONE
                    }
                } else if in_set {
                    ExtReal::from_f64(1.0 / mass)
                } else {
                    ExtReal::ZERO
                }
            })
            .collect()
    }

    fn own_exceptional<'a>(&self, ctx: &RoundContext<'a>) -> Option<&'a [usize]> {
        ctx.exceptional.map(|e| if self.role == Role::I { e.e_i.as_slice() } else { e.e_ii.as_slice() })
    }
}

impl Sceptic for AlphaMember {
    fn bet(&mut self, ctx: &RoundContext<'_>) -> BettingFunction {
        self.stop_on.clear();
        let m = ctx.outcomes();
        let dp = match ctx.pair {
            Some(dp) if !self.stopped => dp,
            _ => return BettingFunction::constant_one(m),
        };
        let h = hellinger_integral(dp, self.alpha);
        let payoff = match self.mode {
            Mode::Solo => {
                if h.is_pos_infinity() {
                    return BettingFunction::constant_one(m);
                }
                self.formula(dp, h.value())
            }
            Mode::Joint if h.is_zero() => self.singular(dp),
            Mode::Joint if h.is_pos_infinity() => {
                self.stop_on = (0..m).collect();
                self.infinite_integral(dp)
            }
            Mode::Joint => {
                self.stop_on = dp.one_sided_zeros();
                let mut payoff = self.formula(dp, h.value());
                if self.alpha.is_small() {
                    if let Some(e) = self.own_exceptional(ctx) {
                        for &w in e {
                            payoff[w] = ExtReal::INFINITY;
                        }
                    }
                }
                payoff
            }
        };
        BettingFunction::new(payoff).expect("power-ratio payoffs are nonnegative")
    }

    fn settle(&mut self, outcome: usize) {
        if self.stop_on.contains(&outcome) {
            self.stopped = true;
        }
    }
}

/// The joint strategy of order `α`: `(Sceptic I, Sceptic II)`.
pub fn alpha_pair(alpha: AlphaParam) -> (AlphaMember, AlphaMember) {
    (AlphaMember::new(Role::I, alpha), AlphaMember::new(Role::II, alpha))
}

/// Sceptic I's bet `(β^II/β^I) f^II`, with `∞` where `β^I = 0` and any
/// shortfall of the mean added back as a constant.
pub fn ratio_tracker_bet(f_ii: &BettingFunction, dp: &DensityPair) -> BettingFunction {
    let payoff: Vec<ExtReal> = (0..dp.len())
        .map(|w| {
            if dp.in_support(w) && dp.beta_i()[w] == 0.0 {
                ExtReal::INFINITY
            } else {
                ext_mul(dp.ratio_ii_over_i(w), f_ii.at(w))
            }
        })
        .collect();
    let raw = BettingFunction::new(payoff).expect("ratio payoffs are nonnegative");
    let mean = raw.mean_under(dp.p_i()).value();
    let payoff = if mean < 1.0 {
        let deficit = ExtReal::from_f64(1.0 - mean);
        raw.payoff()
            .iter()
            .map(|&x| if x.is_finite() { ExtReal::from_f64(x.value() + deficit.value()) } else { x })
            .collect()
    } else {
        // Rounding above 1 only.
        raw.payoff().iter().map(|&x| if x.is_finite() { ExtReal::from_f64(x.value() / mean) } else { x }).collect()
    };
    BettingFunction::new(payoff).expect("ratio payoffs are nonnegative")
}

/// Sceptic I copying Sceptic II's bet, reweighted by the density ratio.
#[derive(Clone, Copy, Debug, Default)]
pub struct RatioTracker;

impl Sceptic for RatioTracker {
    fn bet(&mut self, ctx: &RoundContext<'_>) -> BettingFunction {
        match (ctx.pair, ctx.opponent_bet) {
            (Some(dp), Some(f_ii)) => ratio_tracker_bet(f_ii, dp),
            _ => BettingFunction::constant_one(ctx.outcomes()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{mixture_densities, validate_betting, Distribution, ExceptionalPair};
    use approx::assert_abs_diff_eq;

    fn pair(a: &[f64], b: &[f64]) -> DensityPair {
        mixture_densities(&Distribution::new(a.to_vec()).unwrap(), &Distribution::new(b.to_vec()).unwrap()).unwrap()
    }

    fn al(a: f64) -> AlphaParam {
        AlphaParam::new(a).unwrap()
    }

    fn ctx<'a>(role: Role, dp: &'a DensityPair, opp: Option<&'a BettingFunction>) -> RoundContext<'a> {
        RoundContext {
            round: 1,
            role,
            forecast: if role == Role::I { dp.p_i() } else { dp.p_ii() },
            pair: Some(dp),
            exceptional: None,
            opponent_bet: opp,
            xi: None,
        }
    }

    fn bets(alpha: f64, dp: &DensityPair) -> (BettingFunction, BettingFunction) {
        let (mut si, mut sii) = alpha_pair(al(alpha));
        let f_ii = sii.bet(&ctx(Role::II, dp, None));
        let f_i = si.bet(&ctx(Role::I, dp, Some(&f_ii)));
        (f_i, f_ii)
    }

    fn values(f: &BettingFunction) -> Vec<f64> {
        f.payoff().iter().map(|x| x.value()).collect()
    }

    #[test]
    fn closed_form_bets() {
        let dp = pair(&[0.5, 0.5], &[0.9, 0.1]);
        let (f_i, f_ii) = bets(0.0, &dp);
        let (vi, vii) = (values(&f_i), values(&f_ii));
        assert_abs_diff_eq!(vi[0], 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(vi[1], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(vii[0], 5.0 / 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vii[1], 2.5, epsilon = 1e-12);

        let (f_i, f_ii) = bets(-3.0, &dp);
        let (vi, vii) = (values(&f_i), values(&f_ii));
        assert_abs_diff_eq!(vi[0], 0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(vi[1], 1.8, epsilon = 1e-12);
        assert_abs_diff_eq!(vii[0], 1.0 / 9.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vii[1], 9.0, epsilon = 1e-12);
    }

    #[test]
    fn identical_forecasts_give_fair_bets() {
        let dp = pair(&[0.3, 0.0, 0.7], &[0.3, 0.0, 0.7]);
        for a in [-3.0, -0.5, 0.0, 0.5, 3.0] {
            let (f_i, f_ii) = bets(a, &dp);
            for w in 0..3 {
                assert_abs_diff_eq!(f_i.at(w).value(), 1.0, epsilon = 1e-12);
                assert_abs_diff_eq!(f_ii.at(w).value(), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn singular_round_bets_infinity_on_opposite_sets() {
        let dp = pair(&[1.0, 0.0, 0.0], &[0.0, 0.5, 0.5]);
        let (f_i, f_ii) = bets(0.0, &dp);
        assert!(validate_betting(&f_i, dp.p_i()) && validate_betting(&f_ii, dp.p_ii()));
        assert_eq!(f_i.payoff(), &[ExtReal::ONE, ExtReal::INFINITY, ExtReal::INFINITY]);
        assert_eq!(f_ii.payoff(), &[ExtReal::INFINITY, ExtReal::ONE, ExtReal::ONE]);
    }

    #[test]
    fn infinite_integral_bets_are_fair() {
        // P^II charges outcome 2, which P^I rules out.
        let dp = pair(&[0.5, 0.5, 0.0], &[0.4, 0.4, 0.2]);
        for a in [3.0, -3.0] {
            assert!(hellinger_integral(&dp, al(a)).is_pos_infinity() == (a > 1.0));
        }
        let (f_i, f_ii) = bets(3.0, &dp);
        assert!(validate_betting(&f_i, dp.p_i()) && validate_betting(&f_ii, dp.p_ii()));
        assert!(f_i.at(2).is_pos_infinity());
        assert_abs_diff_eq!(f_ii.at(2).value(), 5.0, epsilon = 1e-12);
        assert_eq!(f_ii.at(0), ExtReal::ZERO);

        let dp = pair(&[0.4, 0.4, 0.2], &[0.5, 0.5, 0.0]);
        let (f_i, f_ii) = bets(-3.0, &dp);
        assert!(validate_betting(&f_i, dp.p_i()) && validate_betting(&f_ii, dp.p_ii()));
        assert!(f_ii.at(2).is_pos_infinity());
        assert_abs_diff_eq!(f_i.at(2).value(), 5.0, epsilon = 1e-12);
    }

    #[test]
    fn one_sided_zero_stops_play() {
        let dp = pair(&[0.5, 0.5, 0.0], &[0.4, 0.4, 0.2]);
        let (mut si, mut sii) = alpha_pair(al(0.0));
        let f_ii = sii.bet(&ctx(Role::II, &dp, None));
        si.bet(&ctx(Role::I, &dp, Some(&f_ii)));
        si.settle(0);
        sii.settle(0);
        assert!(!si.is_stopped() && !sii.is_stopped());
        let f_ii = sii.bet(&ctx(Role::II, &dp, None));
        si.bet(&ctx(Role::I, &dp, Some(&f_ii)));
        si.settle(2);
        sii.settle(2);
        assert!(si.is_stopped() && sii.is_stopped());
        let f_ii = sii.bet(&ctx(Role::II, &dp, None));
        let f_i = si.bet(&ctx(Role::I, &dp, Some(&f_ii)));
        assert_eq!(f_i, BettingFunction::constant_one(3));
        assert_eq!(f_ii, BettingFunction::constant_one(3));
    }

    #[test]
    fn announced_exceptional_sets_pay_infinity() {
        let dp = pair(&[0.5, 0.5, 0.0], &[0.5, 0.5, 0.0]);
        let e = ExceptionalPair { e_i: vec![2], e_ii: vec![] };
        let mut si = AlphaMember::new(Role::I, al(0.0));
        let c = RoundContext { exceptional: Some(&e), ..ctx(Role::I, &dp, None) };
        let f = si.bet(&c);
        assert!(f.at(2).is_pos_infinity());
        assert!(validate_betting(&f, dp.p_i()));
    }

    #[test]
    fn ratio_tracker_examples() {
        let dp = pair(&[0.5, 0.5], &[0.9, 0.1]);
        let f = ratio_tracker_bet(&BettingFunction::constant_one(2), &dp);
        assert_abs_diff_eq!(f.at(0).value(), 1.8, epsilon = 1e-12);
        assert_abs_diff_eq!(f.at(1).value(), 0.2, epsilon = 1e-12);
        let f = ratio_tracker_bet(&BettingFunction::from_values(&[5.0 / 6.0, 2.5]), &dp);
        assert_abs_diff_eq!(f.at(0).value(), 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(f.at(1).value(), 0.5, epsilon = 1e-12);
        let same = pair(&[0.2, 0.8], &[0.2, 0.8]);
        assert_eq!(ratio_tracker_bet(&BettingFunction::constant_one(2), &same), BettingFunction::constant_one(2));
    }

    #[test]
    fn ratio_tracker_tops_up_lost_mass() {
        // Sceptic II puts all its stake where P^I is null.
        let dp = pair(&[0.5, 0.5, 0.0], &[0.25, 0.25, 0.5]);
        let f_ii = BettingFunction::from_values(&[0.0, 0.0, 2.0]);
        let f = ratio_tracker_bet(&f_ii, &dp);
        assert!(validate_betting(&f, dp.p_i()));
        assert!(f.at(2).is_pos_infinity());
        assert_abs_diff_eq!(f.at(0).value(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn solo_member_ignores_infinite_integral() {
        let dp = pair(&[0.4, 0.4, 0.2], &[0.5, 0.5, 0.0]);
        let mut s = AlphaMember::solo_first(al(-3.0));
        assert_eq!(s.bet(&ctx(Role::I, &dp, None)), BettingFunction::constant_one(3));
        let dp = pair(&[0.5, 0.5, 0.0], &[0.4, 0.4, 0.2]);
        let f = s.bet(&ctx(Role::I, &dp, None));
        assert!(f.at(2).is_pos_infinity());
        assert!(validate_betting(&f, dp.p_i()));
    }
}
