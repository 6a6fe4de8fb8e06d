//! Probability forecasts over a finite outcome space and the objects derived
//! from a pair of them.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extmath::{ext_mul, safe_ratio, ExtReal};

/// Absolute tolerance on `Σ p = 1` accepted (and then normalized away) when
/// building a [`Distribution`].
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Relative tolerance on the unit-mean condition of a betting function.
pub const BET_MEAN_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("outcome space needs at least 2 outcomes, got {0}")]
    TooFewOutcomes(usize),
    #[error("probability {value} at outcome {index} is negative or not finite")]
    BadProbability { index: usize, value: f64 },
    #[error("probabilities sum to {0}, not 1")]
    NotNormalized(f64),
    #[error("dimension mismatch: {0} vs {1} outcomes")]
    DimensionMismatch(usize, usize),
    #[error("payoff at outcome {0} is negative or NaN")]
    BadPayoff(usize),
}

/// Finite outcome space `{0, …, m−1}` with optional labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeSpace {
    size: usize,
    labels: Option<Vec<String>>,
}

impl OutcomeSpace {
    pub fn new(size: usize) -> Result<Self, MeasureError> {
        if size < 2 {
            return Err(MeasureError::TooFewOutcomes(size));
        }
        Ok(OutcomeSpace { size, labels: None })
    }

    pub fn labelled(labels: Vec<String>) -> Result<Self, MeasureError> {
        let mut space = OutcomeSpace::new(labels.len())?;
        space.labels = Some(labels);
        Ok(space)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn label(&self, outcome: usize) -> String {
        match &self.labels {
            Some(l) => l[outcome].clone(),
            None => format!("ω{}", outcome + 1),
        }
    }
}

/// A probability vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    /// Builds a distribution, renormalizing if the entries sum to within
    /// [`NORMALIZATION_TOLERANCE`] of 1.
    pub fn new(probs: Vec<f64>) -> Result<Self, MeasureError> {
        if probs.len() < 2 {
            return Err(MeasureError::TooFewOutcomes(probs.len()));
        }
        for (index, &value) in probs.iter().enumerate() {
            if !(value.is_finite() && value >= 0.0) {
                return Err(MeasureError::BadProbability { index, value });
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(MeasureError::NotNormalized(total));
        }
        let probs = if total == 1.0 { probs } else { probs.into_iter().map(|p| p / total).collect() };
        Ok(Distribution { probs })
    }

    /// Like [`Distribution::new`] but keeps the entries as given, so a
    /// serialized distribution reads back bit for bit.
    pub fn exact(probs: Vec<f64>) -> Result<Self, MeasureError> {
        Distribution::new(probs.clone())?;
        Ok(Distribution { probs })
    }

    pub fn uniform(m: usize) -> Result<Self, MeasureError> {
        if m < 2 {
            return Err(MeasureError::TooFewOutcomes(m));
        }
        Ok(Distribution { probs: vec![1.0 / m as f64; m] })
    }

    pub fn point_mass(m: usize, outcome: usize) -> Result<Self, MeasureError> {
        if m < 2 {
            return Err(MeasureError::TooFewOutcomes(m));
        }
        let mut probs = vec![0.0; m];
        probs[outcome] = 1.0;
        Ok(Distribution { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, outcome: usize) -> f64 {
        self.probs[outcome]
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Probability of a set of outcomes.
    pub fn mass(&self, outcomes: &[usize]) -> f64 {
        outcomes.iter().map(|&w| self.probs[w]).sum()
    }

    /// `Σ ξ(ω) p(ω)`.
    pub fn expect(&self, xi: &[f64]) -> f64 {
        debug_assert_eq!(xi.len(), self.probs.len());
        self.probs.iter().zip(xi).map(|(p, x)| p * x).sum()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.probs.iter().enumerate().filter(|(_, &p)| p > 0.0).map(|(i, _)| i)
    }
}

/// Densities of two forecasts with respect to their half-half mixture `Q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityPair {
    p_i: Distribution,
    p_ii: Distribution,
    q: Distribution,
    beta_i: Vec<f64>,
    beta_ii: Vec<f64>,
    zero_i: Vec<usize>,
    zero_ii: Vec<usize>,
}

impl DensityPair {
    pub fn p_i(&self) -> &Distribution {
        &self.p_i
    }

    pub fn p_ii(&self) -> &Distribution {
        &self.p_ii
    }

    pub fn q(&self) -> &Distribution {
        &self.q
    }

    pub fn beta_i(&self) -> &[f64] {
        &self.beta_i
    }

    pub fn beta_ii(&self) -> &[f64] {
        &self.beta_ii
    }

    /// `{β^I = 0}` restricted to the support of `Q`.
    pub fn zero_i(&self) -> &[usize] {
        &self.zero_i
    }

    /// `{β^II = 0}` restricted to the support of `Q`.
    pub fn zero_ii(&self) -> &[usize] {
        &self.zero_ii
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    /// Outcome charged by `Q`; only these enter integrals.
    pub fn in_support(&self, outcome: usize) -> bool {
        self.q.prob(outcome) > 0.0
    }

    /// `β^II(ω) / β^I(ω)` with `0/0 = 1`.
    pub fn ratio_ii_over_i(&self, outcome: usize) -> ExtReal {
        safe_ratio(self.beta_ii[outcome], self.beta_i[outcome])
    }

    /// `β^I(ω) / β^II(ω)` with `0/0 = 1`.
    pub fn ratio_i_over_ii(&self, outcome: usize) -> ExtReal {
        safe_ratio(self.beta_i[outcome], self.beta_ii[outcome])
    }

    /// Outcomes in the support of `Q` where exactly one density vanishes.
    pub fn one_sided_zeros(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.zero_i.iter().chain(&self.zero_ii).copied().collect();
        out.sort_unstable();
        out
    }

    /// Both forecasts charge every outcome.
    pub fn full_support(&self) -> bool {
        self.p_i.probs().iter().chain(self.p_ii.probs()).all(|&p| p > 0.0)
    }
}

/// Nonnegative extended-real payoff vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BettingFunction {
    payoff: Vec<ExtReal>,
}

impl BettingFunction {
    pub fn new(payoff: Vec<ExtReal>) -> Result<Self, MeasureError> {
        if let Some(i) = payoff.iter().position(|f| f.value() < 0.0) {
            return Err(MeasureError::BadPayoff(i));
        }
        Ok(BettingFunction { payoff })
    }

    /// Finite payoffs; panics on negative or NaN entries.
    pub fn from_values(values: &[f64]) -> Self {
        let payoff = values.iter().map(|&v| ExtReal::from_f64(v)).collect();
        BettingFunction::new(payoff).expect("payoffs must be nonnegative")
    }

    /// The fair bet `f ≡ 1`.
    pub fn constant_one(m: usize) -> Self {
        BettingFunction { payoff: vec![ExtReal::ONE; m] }
    }

    pub fn payoff(&self) -> &[ExtReal] {
        &self.payoff
    }

    pub fn at(&self, outcome: usize) -> ExtReal {
        self.payoff[outcome]
    }

    pub fn len(&self) -> usize {
        self.payoff.len()
    }

    pub fn is_empty(&self) -> bool {
        self.payoff.is_empty()
    }

    /// `Σ f(ω) p(ω)` with `0 · ∞ = 0`.
    pub fn mean_under(&self, p: &Distribution) -> ExtReal {
        let total: f64 =
            self.payoff.iter().zip(p.probs()).map(|(&f, &pw)| ext_mul(f, ExtReal::from_f64(pw)).value()).sum();
        ExtReal::from_f64(total)
    }
}

/// Whether `f` is a fair bet against `p`: nonnegative with unit mean.
pub fn validate_betting(f: &BettingFunction, p: &Distribution) -> bool {
    if f.len() != p.len() {
        return false;
    }
    if f.payoff().iter().any(|x| x.value() < 0.0) {
        return false;
    }
    let mean = f.mean_under(p);
    mean.is_finite() && (mean.value() - 1.0).abs() <= BET_MEAN_TOLERANCE
}

/// Null sets `(E^I, E^II)` outside of which the two forecasts agree on which
/// outcomes are null.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionalPair {
    pub e_i: Vec<usize>,
    pub e_ii: Vec<usize>,
}

impl ExceptionalPair {
    pub fn is_valid_for(&self, p_i: &Distribution, p_ii: &Distribution) -> bool {
        let m = p_i.len();
        if p_ii.len() != m || self.e_i.iter().chain(&self.e_ii).any(|&w| w >= m) {
            return false;
        }
        if p_i.mass(&self.e_i) != 0.0 || p_ii.mass(&self.e_ii) != 0.0 {
            return false;
        }
        (0..m)
            .filter(|w| !self.e_i.contains(w) && !self.e_ii.contains(w))
            .all(|w| (p_i.prob(w) == 0.0) == (p_ii.prob(w) == 0.0))
    }

    pub fn contains(&self, outcome: usize) -> bool {
        self.e_i.contains(&outcome) || self.e_ii.contains(&outcome)
    }
}

/// Densities of `p_i` and `p_ii` with respect to `Q = (p_i + p_ii)/2`.
pub fn mixture_densities(p_i: &Distribution, p_ii: &Distribution) -> Result<DensityPair, MeasureError> {
    if p_i.len() != p_ii.len() {
        return Err(MeasureError::DimensionMismatch(p_i.len(), p_ii.len()));
    }
    let m = p_i.len();
    let q: Vec<f64> = p_i.probs().iter().zip(p_ii.probs()).map(|(a, b)| 0.5 * (a + b)).collect();
    let density =
        |p: &Distribution| -> Vec<f64> { (0..m).map(|w| if q[w] == 0.0 { 0.0 } else { p.prob(w) / q[w] }).collect() };
    let beta_i = density(p_i);
    let beta_ii = density(p_ii);
    let zero_set = |beta: &[f64]| -> Vec<usize> { (0..m).filter(|&w| q[w] > 0.0 && beta[w] == 0.0).collect() };
    let zero_i = zero_set(&beta_i);
    let zero_ii = zero_set(&beta_ii);
    Ok(DensityPair {
        p_i: p_i.clone(),
        p_ii: p_ii.clone(),
        q: Distribution { probs: q },
        beta_i,
        beta_ii,
        zero_i,
        zero_ii,
    })
}

/// `(E^I, E^II) = ({β^I = 0}, {β^II = 0})`.
pub fn exceptional_pair(dp: &DensityPair) -> ExceptionalPair {
    ExceptionalPair { e_i: dp.zero_i.clone(), e_ii: dp.zero_ii.clone() }
}

/// `1/c ≤ β^II/β^I ≤ c` at every outcome, with `0/0 = 1`.
pub fn is_c_timid(dp: &DensityPair, c: f64) -> bool {
    assert!(c > 1.0, "timidity constant must exceed 1");
    (0..dp.len()).all(|w| {
        let r = dp.ratio_ii_over_i(w).value();
        r >= 1.0 / c && r <= c
    })
}

/// `p_i ≪ p_ii`.
pub fn is_absolutely_continuous(p_i: &Distribution, p_ii: &Distribution) -> bool {
    p_i.probs().iter().zip(p_ii.probs()).all(|(&a, &b)| b > 0.0 || a == 0.0)
}
