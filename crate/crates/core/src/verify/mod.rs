//! Checkers that evaluate both sides of the capital identities and bounds
//! on transcripts, plus the explicit constants of the auxiliary inequalities.
//!
//! Every checker returns a [`CheckReport`] whose `pass` flag is exactly
//! `max_violation <= tolerance`.

pub mod suites;

pub use suites::{random_pair, run_suite, Suite};

use std::f64::consts::E;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::divergence::{chi2_divergence, div_bracket, div_paren, kl_divergence, AlphaParam};
use crate::engine::Transcript;
use crate::extmath::{truncate_at_one, ExtReal, LogCapital};
use crate::measures::{is_c_timid, DensityPair};

/// Relative tolerance of identity checks.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;
/// Additive slack of inequality checks.
pub const INEQUALITY_SLACK: f64 = 1e-9;
/// Tolerance of formula cross-checks.
pub const FORMULA_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("round {round} is not {c}-timid")]
    NotTimid { round: usize, c: f64 },
    #[error("timidity constant must exceed 1, got {0}")]
    BadTimidity(f64),
    #[error("alpha must lie in (-1, 1), got {0}")]
    AlphaRange(f64),
    #[error("alpha must be below -1, got {0}")]
    BigAlphaRange(f64),
    #[error("gamma must lie in (0, 1), got {0}")]
    GammaRange(f64),
    #[error("grid point {0} is not positive")]
    GridPoint(f64),
    #[error("capital series has {got} rounds, transcript has {want}")]
    SeriesLength { got: usize, want: usize },
    #[error("{0}")]
    Parameter(String),
}

/// One evaluation of both sides. `lhs = None` means the left side is the
/// indefinite `∞ − ∞`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckPoint {
    /// Round number, or grid/pair index for checks that are not per round.
    pub index: usize,
    pub lhs: Option<ExtReal>,
    pub rhs: ExtReal,
    pub violation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub points: Vec<CheckPoint>,
    pub pass: bool,
    pub max_violation: f64,
    pub tolerance: f64,
}

impl CheckReport {
    pub fn from_points(name: impl Into<String>, points: Vec<CheckPoint>, tolerance: f64) -> Self {
        let max_violation = points.iter().map(|p| p.violation).fold(0.0, f64::max);
        CheckReport { name: name.into(), points, pass: max_violation <= tolerance, max_violation, tolerance }
    }

    /// Merges several reports with the same tolerance into one.
    pub fn combine(name: impl Into<String>, reports: Vec<CheckReport>) -> Self {
        let tolerance = reports.first().map_or(0.0, |r| r.tolerance);
        let points = reports.into_iter().flat_map(|r| r.points).collect();
        CheckReport::from_points(name, points, tolerance)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} (max violation {:e}, tolerance {:e}, {} points)",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.max_violation,
            self.tolerance,
            self.points.len()
        )
    }
}

/// Violation of `lhs = rhs`, relative to `max(1, |rhs|)`.
fn identity_violation(lhs: Option<ExtReal>, rhs: ExtReal) -> f64 {
    match lhs {
        None => 0.0,
        Some(l) if l.is_finite() && rhs.is_finite() => (l.value() - rhs.value()).abs() / rhs.value().abs().max(1.0),
        Some(l) if l == rhs => 0.0,
        Some(_) => f64::INFINITY,
    }
}

/// Violation of `lhs ≤ rhs`.
fn upper_violation(lhs: Option<ExtReal>, rhs: ExtReal) -> f64 {
    match lhs {
        None => 0.0,
        Some(l) if rhs.is_pos_infinity() || l.is_neg_infinity() => 0.0,
        Some(l) if l.is_finite() && rhs.is_finite() => (l.value() - rhs.value()).max(0.0),
        Some(_) => f64::INFINITY,
    }
}

/// Violation of `lhs ≥ rhs`.
fn lower_violation(lhs: Option<ExtReal>, rhs: ExtReal) -> f64 {
    upper_violation(lhs.map(|l| ExtReal::from_f64(-l.value())), ExtReal::from_f64(-rhs.value()))
}

fn add(a: ExtReal, b: ExtReal) -> ExtReal {
    a.checked_add(b).unwrap_or(ExtReal::INFINITY)
}

/// Running sums of a per-round divergence.
fn cumulative(t: &Transcript, d: impl Fn(&DensityPair) -> ExtReal) -> Vec<ExtReal> {
    let mut total = ExtReal::ZERO;
    t.rounds
        .iter()
        .map(|r| {
            total = add(total, d(&r.pair));
            total
        })
        .collect()
}

/// `(2/(1+α)) ln K^I + (2/(1−α)) ln K^II`.
pub fn weighted_log_capitals(log_k_i: LogCapital, log_k_ii: LogCapital, alpha: AlphaParam) -> LogCapital {
    let a = alpha.value();
    log_k_i.scale(2.0 / (1.0 + a)).sum(log_k_ii.scale(2.0 / (1.0 - a)))
}

/// The joint identity of the alpha pair, checked after every round.
pub fn check_small_alpha_identity(t: &Transcript, alpha: AlphaParam) -> CheckReport {
    let rhs = cumulative(t, |dp| div_bracket(dp, alpha));
    let points = t
        .rounds
        .iter()
        .zip(rhs)
        .map(|(r, rhs)| {
            let lhs = weighted_log_capitals(r.log_k_i, r.log_k_ii, alpha).value();
            CheckPoint { index: r.n, lhs, rhs, violation: identity_violation(lhs, rhs) }
        })
        .collect();
    CheckReport::from_points(format!("small_alpha_identity(alpha={})", alpha.value()), points, IDENTITY_TOLERANCE)
}

/// Sceptic I's guarantee for `α < −1`, checked after every round.
pub fn check_big_alpha_bound(t: &Transcript, alpha: AlphaParam) -> Result<CheckReport, VerifyError> {
    if alpha.value() >= -1.0 {
        return Err(VerifyError::BigAlphaRange(alpha.value()));
    }
    let rhs = cumulative(t, |dp| div_bracket(dp, alpha));
    let points = t
        .rounds
        .iter()
        .zip(rhs)
        .map(|(r, rhs)| {
            let lhs = weighted_log_capitals(r.log_k_i, r.log_k_ii, alpha).value();
            CheckPoint { index: r.n, lhs, rhs, violation: upper_violation(lhs, rhs) }
        })
        .collect();
    Ok(CheckReport::from_points(format!("big_alpha_bound(alpha={})", alpha.value()), points, INEQUALITY_SLACK))
}

/// Which growth inequality to evaluate.
///
/// The `Fixed*` variants take the horizon `N` to be the transcript length
/// and use `ε = N^{-1/2}`. The others hold for a given `ε` at every round
/// `n`, with `n` in place of `N`; `Penalized*` add the `2 ln k` cost of
/// recovering component `k` from a mixture with weights `∝ k^{-2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "variant")]
pub enum GrowthVariant {
    /// `ln K^II ≥ Σ KL − (√N − 1)(ln K^I + 2c ln²c)`.
    FixedLower,
    /// `ln K^II ≤ Σ KL + (√N + 1)(ln K^I + c ln²c)`.
    FixedUpper,
    /// `ln K^II ≥ Σ KL − ½ n ε c^ε ln²c − ((1−ε)/ε) ln K^I`.
    Lower { eps: f64 },
    /// `ln K^II ≤ Σ KL + ½ n ε c^ε ln²c + ((1+ε)/ε) ln K^I`.
    Upper { eps: f64 },
    /// `Lower` with `ln K ↦ ln K + 2 ln k` on both capitals.
    PenalizedLower { eps: f64, k: u32 },
    /// `Upper` with `ln K^I ↦ ln K^I + 2 ln k`.
    PenalizedUpper { eps: f64, k: u32 },
}

impl fmt::Display for GrowthVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthVariant::FixedLower => write!(f, "fixed_lower"),
            GrowthVariant::FixedUpper => write!(f, "fixed_upper"),
            GrowthVariant::Lower { eps } => write!(f, "lower(eps={eps})"),
            GrowthVariant::Upper { eps } => write!(f, "upper(eps={eps})"),
            GrowthVariant::PenalizedLower { eps, k } => write!(f, "penalized_lower(eps={eps}, k={k})"),
            GrowthVariant::PenalizedUpper { eps, k } => write!(f, "penalized_upper(eps={eps}, k={k})"),
        }
    }
}

/// `2c ln²c`, the constant of the fixed-horizon lower bound.
pub fn fixed_lower_constant(c: f64) -> f64 {
    2.0 * c * c.ln().powi(2)
}

/// `c ln²c`, the constant of the fixed-horizon upper bound.
pub fn fixed_upper_constant(c: f64) -> f64 {
    c * c.ln().powi(2)
}

/// Growth bound on the engine's own capitals.
pub fn check_growth_bounds(t: &Transcript, c: f64, variant: GrowthVariant) -> Result<CheckReport, VerifyError> {
    let log_i: Vec<LogCapital> = t.rounds.iter().map(|r| r.log_k_i).collect();
    let log_ii: Vec<LogCapital> = t.rounds.iter().map(|r| r.log_k_ii).collect();
    check_growth_series(t, c, variant, &log_i, &log_ii)
}

/// Growth bound on externally tracked capitals, such as one component of
/// a mixture, evaluated against the transcript's forecasts.
pub fn check_growth_series(
    t: &Transcript,
    c: f64,
    variant: GrowthVariant,
    log_k_i: &[LogCapital],
    log_k_ii: &[LogCapital],
) -> Result<CheckReport, VerifyError> {
    if !(c > 1.0 && c.is_finite()) {
        return Err(VerifyError::BadTimidity(c));
    }
    for series in [log_k_i, log_k_ii] {
        if series.len() != t.len() {
            return Err(VerifyError::SeriesLength { got: series.len(), want: t.len() });
        }
    }
    if let Some(r) = t.rounds.iter().find(|r| !is_c_timid(&r.pair, c)) {
        return Err(VerifyError::NotTimid { round: r.n, c });
    }
    let eps_ok = |eps: f64| eps > 0.0 && eps < 1.0;
    match variant {
        GrowthVariant::Lower { eps } | GrowthVariant::Upper { eps } if !eps_ok(eps) => {
            return Err(VerifyError::Parameter(format!("eps must lie in (0, 1), got {eps}")));
        }
        GrowthVariant::PenalizedLower { eps, k } | GrowthVariant::PenalizedUpper { eps, k }
            if !eps_ok(eps) || k < 2 =>
        {
            return Err(VerifyError::Parameter(format!("need eps in (0, 1) and k >= 2, got eps={eps}, k={k}")));
        }
        GrowthVariant::FixedLower if t.len() < 2 => {
            return Err(VerifyError::Parameter("fixed lower bound needs a horizon of at least 2".into()));
        }
        _ => {}
    }

    let kl = cumulative(t, kl_divergence);
    let ln2c = c.ln().powi(2);
    let root_n = (t.len() as f64).sqrt();
    let mut points = Vec::with_capacity(t.len());
    for (i, r) in t.rounds.iter().enumerate() {
        let n = (i + 1) as f64;
        let kl = kl[i];
        let quad = |eps: f64| 0.5 * n * eps * c.powf(eps) * ln2c;
        let (lhs, rhs, lower) = match variant {
            GrowthVariant::FixedLower => {
                let rhs = kl.value() - (root_n - 1.0) * fixed_lower_constant(c);
                (log_k_ii[i].sum(log_k_i[i].scale(root_n - 1.0)), rhs, true)
            }
            GrowthVariant::FixedUpper => {
                let rhs = kl.value() + (root_n + 1.0) * fixed_upper_constant(c);
                (log_k_ii[i].sum(log_k_i[i].scale(-(root_n + 1.0))), rhs, false)
            }
            GrowthVariant::Lower { eps } => {
                (log_k_ii[i].sum(log_k_i[i].scale((1.0 - eps) / eps)), kl.value() - quad(eps), true)
            }
            GrowthVariant::Upper { eps } => {
                (log_k_ii[i].sum(log_k_i[i].scale(-(1.0 + eps) / eps)), kl.value() + quad(eps), false)
            }
            GrowthVariant::PenalizedLower { eps, k } => {
                let pen = ExtReal::from_f64(2.0 * f64::from(k).ln());
                let l_i = log_k_i[i].add_log(pen);
                (log_k_ii[i].add_log(pen).sum(l_i.scale((1.0 - eps) / eps)), kl.value() - quad(eps), true)
            }
            GrowthVariant::PenalizedUpper { eps, k } => {
                let pen = ExtReal::from_f64(2.0 * f64::from(k).ln());
                let l_i = log_k_i[i].add_log(pen);
                (log_k_ii[i].sum(l_i.scale(-(1.0 + eps) / eps)), kl.value() + quad(eps), false)
            }
        };
        let lhs = lhs.value();
        let rhs = ExtReal::from_f64(rhs);
        let violation = if lower { lower_violation(lhs, rhs) } else { upper_violation(lhs, rhs) };
        points.push(CheckPoint { index: r.n, lhs, rhs, violation });
    }
    Ok(CheckReport::from_points(format!("growth_{variant}(c={c})"), points, INEQUALITY_SLACK))
}

/// Constant `C(α)` with `P^I{β^I > e β^II} ≤ C(α) D^(α)` for `α ∈ (−1, 1)`.
pub fn lemma6_constant(alpha: f64) -> Result<f64, VerifyError> {
    if !(alpha > -1.0 && alpha < 1.0) {
        return Err(VerifyError::AlphaRange(alpha));
    }
    let den = (1.0 - alpha) / 2.0 + (1.0 + alpha) / (2.0 * E) - (-(1.0 + alpha) / 2.0).exp();
    Ok((1.0 - alpha * alpha) / 4.0 / den)
}

/// `P^I{β^I > e β^II}`.
pub fn likelihood_jump_mass(dp: &DensityPair) -> f64 {
    (0..dp.len()).filter(|&w| dp.beta_i()[w] > E * dp.beta_ii()[w]).map(|w| dp.p_i().prob(w)).sum()
}

/// `P^I{β^I > e β^II} ≤ C(α) D^(α)` on one pair.
pub fn check_lemma6(dp: &DensityPair, alpha: f64) -> Result<CheckReport, VerifyError> {
    check_lemma6_pairs(std::slice::from_ref(dp), alpha)
}

/// [`check_lemma6`] over many pairs, one point per pair.
pub fn check_lemma6_pairs(pairs: &[DensityPair], alpha: f64) -> Result<CheckReport, VerifyError> {
    let c = lemma6_constant(alpha)?;
    let a = AlphaParam::new(alpha).map_err(|e| VerifyError::Parameter(e.to_string()))?;
    let points = pairs
        .iter()
        .enumerate()
        .map(|(i, dp)| {
            let lhs = Some(ExtReal::from_f64(likelihood_jump_mass(dp)));
            let rhs = ExtReal::from_f64(c * div_paren(dp, a).value());
            CheckPoint { index: i, lhs, rhs, violation: upper_violation(lhs, rhs) }
        })
        .collect();
    Ok(CheckReport::from_points(format!("lemma6(alpha={alpha})"), points, FORMULA_TOLERANCE))
}

/// Constant `B(γ) = max(5e^{1−γ}/(1−γ) + 1, (2e − e^γ)/(e − e^γ))`.
pub fn lemma7_constant(gamma: f64) -> Result<f64, VerifyError> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(VerifyError::GammaRange(gamma));
    }
    let first = 5.0 * (1.0 - gamma).exp() / (1.0 - gamma) + 1.0;
    let second = (2.0 * E - gamma.exp()) / (E - gamma.exp());
    Ok(first.max(second))
}

/// `x U(ln x) + x U²(ln x) ≤ B(x − 1) + ((B − 1)/γ)(1 − x^γ)` on a grid.
pub fn check_lemma7(gamma: f64, grid: &[f64]) -> Result<CheckReport, VerifyError> {
    let b = lemma7_constant(gamma)?;
    let mut points = Vec::with_capacity(grid.len());
    for (i, &x) in grid.iter().enumerate() {
        if !(x > 0.0 && x.is_finite()) {
            return Err(VerifyError::GridPoint(x));
        }
        let u = truncate_at_one(x.ln());
        let lhs = Some(ExtReal::from_f64(x * u + x * u * u));
        let rhs = ExtReal::from_f64(b * (x - 1.0) + (b - 1.0) / gamma * (1.0 - x.powf(gamma)));
        points.push(CheckPoint { index: i, lhs, rhs, violation: upper_violation(lhs, rhs) });
    }
    Ok(CheckReport::from_points(format!("lemma7(gamma={gamma})"), points, INEQUALITY_SLACK))
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2, "invalid grid");
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

fn rel(x: ExtReal) -> f64 {
    x.value().abs().max(1.0)
}

/// Relations among the divergences on every pair and order of the grid:
/// nonnegativity, the ordering of the two alpha-divergences, the Hellinger
/// and χ² special cases, and monotonicity of `(1∓α) D^(α)` over the grid
/// orders inside `(−1, 1)`.
pub fn check_divergence_relations(pairs: &[DensityPair], alpha_grid: &[f64]) -> Result<Vec<CheckReport>, VerifyError> {
    let alphas: Vec<AlphaParam> = alpha_grid
        .iter()
        .map(|&a| AlphaParam::new(a).map_err(|e| VerifyError::Parameter(e.to_string())))
        .collect::<Result<_, _>>()?;
    let mut small: Vec<AlphaParam> = alphas.iter().copied().filter(|a| a.is_small()).collect();
    small.sort_by(|a, b| a.value().total_cmp(&b.value()));

    let mut nonneg = Vec::new();
    let mut order = Vec::new();
    let mut special = Vec::new();
    let mut mono = Vec::new();
    let zero = ExtReal::ZERO;
    for (i, dp) in pairs.iter().enumerate() {
        for &a in &alphas {
            for d in [div_paren(dp, a), div_bracket(dp, a)] {
                nonneg.push(CheckPoint {
                    index: i,
                    lhs: Some(d),
                    rhs: zero,
                    violation: lower_violation(Some(d), zero),
                });
            }
            let (p, b) = (div_paren(dp, a), div_bracket(dp, a));
            let (lhs, rhs) = if a.is_small() { (p, b) } else { (b, p) };
            // Scale-aware slack: both sides are computed from the same integral.
            let v = upper_violation(Some(lhs), rhs) / rel(rhs);
            order.push(CheckPoint { index: i, lhs: Some(lhs), rhs, violation: v });
        }
        for d in [kl_divergence(dp), chi2_divergence(dp)] {
            nonneg.push(CheckPoint { index: i, lhs: Some(d), rhs: zero, violation: lower_violation(Some(d), zero) });
        }

        let chi = chi2_divergence(dp);
        let paren_m3 = div_paren(dp, AlphaParam::new(-3.0).expect("valid order"));
        special.push(CheckPoint {
            index: i,
            lhs: Some(chi),
            rhs: paren_m3,
            violation: identity_violation(Some(chi), paren_m3),
        });
        let hell = div_paren(dp, AlphaParam::new(0.0).expect("valid order"));
        let direct: f64 =
            dp.p_i().probs().iter().zip(dp.p_ii().probs()).map(|(a, b)| (a.sqrt() - b.sqrt()).powi(2)).sum::<f64>()
                * 2.0;
        let direct = ExtReal::from_f64(direct);
        special.push(CheckPoint {
            index: i,
            lhs: Some(hell),
            rhs: direct,
            violation: identity_violation(Some(hell), direct),
        });

        for w in small.windows(2) {
            let (a0, a1) = (w[0].value(), w[1].value());
            let (d0, d1) = (div_paren(dp, w[0]).value(), div_paren(dp, w[1]).value());
            // (1−α) D^(α) decreasing, (1+α) D^(α) increasing.
            let pairs = [((1.0 - a1) * d1, (1.0 - a0) * d0), ((1.0 + a0) * d0, (1.0 + a1) * d1)];
            for (lo, hi) in pairs {
                let (l, h) = (ExtReal::from_f64(lo), ExtReal::from_f64(hi));
                mono.push(CheckPoint {
                    index: i,
                    lhs: Some(l),
                    rhs: h,
                    violation: upper_violation(Some(l), h) / rel(h),
                });
            }
        }
    }
    Ok(vec![
        CheckReport::from_points("divergence_nonnegative", nonneg, FORMULA_TOLERANCE),
        CheckReport::from_points("divergence_ordering", order, FORMULA_TOLERANCE),
        CheckReport::from_points("divergence_special_cases", special, FORMULA_TOLERANCE),
        CheckReport::from_points("divergence_monotonicity", mono, FORMULA_TOLERANCE),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run_competitive, Players};
    use crate::engine::{FixedForecaster, ScriptedReality};
    use crate::measures::{mixture_densities, Distribution};
    use crate::strategies::{alpha_pair, big_alpha_sceptic_i, growth_joint_fixed, ConstantSceptic};
    use approx::assert_abs_diff_eq;

    fn d(v: &[f64]) -> Distribution {
        Distribution::new(v.to_vec()).unwrap()
    }

    fn anchor() -> DensityPair {
        mixture_densities(&d(&[0.5, 0.5]), &d(&[0.9, 0.1])).unwrap()
    }

    fn play(
        p: &[f64],
        q: &[f64],
        si: &mut dyn crate::engine::Sceptic,
        sii: &mut dyn crate::engine::Sceptic,
        outcomes: Vec<usize>,
    ) -> Transcript {
        let n = outcomes.len();
        run_competitive(
            Players {
                forecaster_i: &mut FixedForecaster(d(p)),
                forecaster_ii: &mut FixedForecaster(d(q)),
                sceptic_i: si,
                sceptic_ii: sii,
                reality: &mut ScriptedReality::new(outcomes),
            },
            n,
        )
        .unwrap()
    }

    #[test]
    fn constants() {
        assert_abs_diff_eq!(lemma6_constant(0.0).unwrap(), 3.229596085784781, epsilon = 1e-12);
        assert_abs_diff_eq!(lemma6_constant(0.5).unwrap(), 3.501856479208832, epsilon = 1e-12);
        assert!(lemma6_constant(1.0).is_err());
        assert!(lemma6_constant(-1.0).is_err());
        assert_abs_diff_eq!(lemma7_constant(0.5).unwrap(), 17.487212707001284, epsilon = 1e-12);
        assert_abs_diff_eq!(lemma7_constant(0.25).unwrap(), 15.113333444084498, epsilon = 1e-12);
        assert!(lemma7_constant(1.0).is_err());
        assert_abs_diff_eq!(fixed_lower_constant(2.0), 1.9218120556728056, epsilon = 1e-15);
        assert_abs_diff_eq!(fixed_upper_constant(2.0), 0.9609060278364028, epsilon = 1e-15);
    }

    #[test]
    fn lemma6_on_the_anchor_pair() {
        let r = check_lemma6(&anchor(), 0.0).unwrap();
        assert!(r.pass);
        assert_eq!(r.points[0].lhs.unwrap().value(), 0.5);
        assert_abs_diff_eq!(r.points[0].rhs.value(), 1.3638301228479042, epsilon = 1e-12);
        let same = mixture_densities(&d(&[0.3, 0.7]), &d(&[0.3, 0.7])).unwrap();
        assert!(check_lemma6(&same, 0.5).unwrap().pass);
    }

    #[test]
    fn lemma7_points() {
        let r = check_lemma7(0.5, &[1.0, E]).unwrap();
        assert!(r.pass);
        assert_abs_diff_eq!(r.points[0].rhs.value(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.points[1].lhs.unwrap().value(), 5.43656365691809, epsilon = 1e-12);
        assert_abs_diff_eq!(r.points[1].rhs.value(), 8.656748669660068, epsilon = 1e-9);
        assert!(check_lemma7(0.5, &[0.0]).is_err());
        let grid = log_grid(1e-6, 1e3, 10_000);
        assert_eq!(grid.len(), 10_000);
        assert_abs_diff_eq!(grid[0], 1e-6, epsilon = 1e-18);
        assert_abs_diff_eq!(grid[9_999], 1e3, epsilon = 1e-9);
    }

    #[test]
    fn one_round_identity() {
        let a = AlphaParam::new(0.0).unwrap();
        let (mut si, mut sii) = alpha_pair(a);
        let t = play(&[0.5, 0.5], &[0.9, 0.1], &mut si, &mut sii, vec![0]);
        let r = check_small_alpha_identity(&t, a);
        assert!(r.pass);
        assert!(r.max_violation < 1e-12);
        assert_abs_diff_eq!(r.points[0].rhs.value(), 0.44628710262841914, epsilon = 1e-12);

        let a = AlphaParam::new(-3.0).unwrap();
        let (mut si, mut sii) = alpha_pair(a);
        let t = play(&[0.5, 0.5], &[0.9, 0.1], &mut si, &mut sii, vec![1]);
        let r = check_small_alpha_identity(&t, a);
        assert!(r.pass);
        assert_abs_diff_eq!(r.points[0].lhs.unwrap().value(), 0.5108256237659906, epsilon = 1e-12);
    }

    #[test]
    fn identical_forecasts_are_trivial() {
        let a = AlphaParam::new(0.5).unwrap();
        let (mut si, mut sii) = alpha_pair(a);
        let t = play(&[0.2, 0.8], &[0.2, 0.8], &mut si, &mut sii, vec![0, 1, 1]);
        let r = check_small_alpha_identity(&t, a);
        assert!(r.pass && r.max_violation == 0.0);
        let g = check_growth_bounds(&t, 2.0, GrowthVariant::FixedLower).unwrap();
        assert!(g.pass);
    }

    #[test]
    fn identity_detects_a_wrong_transcript() {
        let a = AlphaParam::new(0.0).unwrap();
        let t = play(&[0.5, 0.5], &[0.9, 0.1], &mut ConstantSceptic, &mut ConstantSceptic, vec![0]);
        let r = check_small_alpha_identity(&t, a);
        assert!(!r.pass);
        assert_abs_diff_eq!(r.max_violation, 0.44628710262841914, epsilon = 1e-12);
    }

    #[test]
    fn big_alpha_first_round() {
        let a = AlphaParam::new(-3.0).unwrap();
        let mut si = big_alpha_sceptic_i(-3.0).unwrap();
        let t = play(&[0.5, 0.5], &[0.9, 0.1], &mut si, &mut ConstantSceptic, vec![0]);
        let r = check_big_alpha_bound(&t, a).unwrap();
        assert!(r.pass);
        assert_abs_diff_eq!(r.points[0].lhs.unwrap().value(), 0.0, epsilon = 1e-12);
        assert!(check_big_alpha_bound(&t, AlphaParam::new(0.5).unwrap()).is_err());
    }

    #[test]
    fn fixed_lower_at_four_rounds() {
        let (mut si, mut sii) = growth_joint_fixed(4).unwrap();
        let t = play(&[0.5, 0.5], &[0.9, 0.1], &mut si, &mut sii, vec![0, 1, 1, 0]);
        assert!(check_growth_bounds(&t, 5.0, GrowthVariant::FixedLower).unwrap().pass);
        assert!(matches!(
            check_growth_bounds(&t, 2.0, GrowthVariant::FixedLower),
            Err(VerifyError::NotTimid { round: 1, .. })
        ));
    }

    #[test]
    fn violation_conventions() {
        let inf = ExtReal::INFINITY;
        assert_eq!(identity_violation(None, ExtReal::ONE), 0.0);
        assert_eq!(identity_violation(Some(inf), inf), 0.0);
        assert_eq!(identity_violation(Some(ExtReal::ONE), inf), f64::INFINITY);
        assert_eq!(upper_violation(Some(inf), inf), 0.0);
        assert_eq!(upper_violation(Some(inf), ExtReal::ONE), f64::INFINITY);
        assert_eq!(lower_violation(Some(ExtReal::ONE), ExtReal::ZERO), 0.0);
        assert_eq!(lower_violation(Some(ExtReal::ZERO), ExtReal::ONE), 1.0);
    }

    #[test]
    fn relations_on_the_anchor_pair() {
        let reports = check_divergence_relations(&[anchor()], &[-3.0, -0.5, 0.0, 0.5, 3.0]).unwrap();
        assert_eq!(reports.len(), 4);
        assert!(reports.iter().all(|r| r.pass), "{reports:?}");
    }
}
