//! Divergences between two forecasts on a finite outcome space.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extmath::{ext_mul, safe_ratio, ExtReal};
use crate::measures::DensityPair;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DivergenceError {
    #[error("alpha must be finite and differ from -1 and 1, got {0}")]
    BadAlpha(f64),
    #[error("Renyi order must be positive and differ from 1, got {0}")]
    BadRenyiOrder(f64),
}

/// Order parameter of the alpha-divergence family, never `±1`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct AlphaParam(f64);

impl AlphaParam {
    pub fn new(alpha: f64) -> Result<Self, DivergenceError> {
        if !alpha.is_finite() || alpha == 1.0 || alpha == -1.0 {
            return Err(DivergenceError::BadAlpha(alpha));
        }
        Ok(AlphaParam(alpha))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Exponent `(1−α)/2` carried by `β^I`.
    pub fn exponent_i(self) -> f64 {
        (1.0 - self.0) / 2.0
    }

    /// Exponent `(1+α)/2` carried by `β^II`.
    pub fn exponent_ii(self) -> f64 {
        (1.0 + self.0) / 2.0
    }

    /// The mirrored order `−α`.
    pub fn mirrored(self) -> AlphaParam {
        AlphaParam(-self.0)
    }

    pub fn is_small(self) -> bool {
        self.0.abs() < 1.0
    }
}

impl TryFrom<f64> for AlphaParam {
    type Error = DivergenceError;

    fn try_from(x: f64) -> Result<Self, Self::Error> {
        AlphaParam::new(x)
    }
}

impl From<AlphaParam> for f64 {
    fn from(a: AlphaParam) -> f64 {
        a.0
    }
}

/// `Σ (β^I)^a (β^II)^b q` over the support of `q`.
fn power_integral(dp: &DensityPair, a: f64, b: f64) -> ExtReal {
    let mut total = 0.0;
    for w in 0..dp.len() {
        let q = dp.q().prob(w);
        if q == 0.0 {
            continue;
        }
        let x = ExtReal::from_f64(dp.beta_i()[w]).powf(a);
        let y = ExtReal::from_f64(dp.beta_ii()[w]).powf(b);
        total += ext_mul(ext_mul(x, y), ExtReal::from_f64(q)).value();
    }
    ExtReal::from_f64(total)
}

/// Hellinger integral of order `(1−α)/2`.
pub fn hellinger_integral(dp: &DensityPair, alpha: AlphaParam) -> ExtReal {
    power_integral(dp, alpha.exponent_i(), alpha.exponent_ii())
}

/// `D^(α) = 4/(1−α²) · (1 − H)`.
pub fn div_paren(dp: &DensityPair, alpha: AlphaParam) -> ExtReal {
    let a = alpha.value();
    let h = hellinger_integral(dp, alpha);
    let coef = 4.0 / (1.0 - a * a);
    if h.is_pos_infinity() {
        // Only possible for |α| > 1, where the coefficient is negative.
        return ExtReal::INFINITY;
    }
    ExtReal::from_f64(coef * (1.0 - h.value()))
}

/// `D^[α] = 4/(α²−1) · ln H`.
pub fn div_bracket(dp: &DensityPair, alpha: AlphaParam) -> ExtReal {
    let a = alpha.value();
    let coef = 4.0 / (a * a - 1.0);
    let ln_h = hellinger_integral(dp, alpha).ln();
    if ln_h.is_finite() {
        ExtReal::from_f64(coef * ln_h.value())
    } else {
        // H = 0 with |α| < 1, or H = ∞ with |α| > 1.
        ExtReal::INFINITY
    }
}

/// Kullback–Leibler divergence of the first forecast from the second.
pub fn kl_divergence(dp: &DensityPair) -> ExtReal {
    let mut total = 0.0;
    for w in 0..dp.len() {
        let p = dp.p_i().prob(w);
        if p == 0.0 {
            continue;
        }
        let r = safe_ratio(dp.beta_i()[w], dp.beta_ii()[w]);
        if r.is_pos_infinity() {
            return ExtReal::INFINITY;
        }
        total += p * r.value().ln();
    }
    ExtReal::from_f64(total)
}

/// χ² distance `½ Σ (β^I − β^II)²/β^II · q`.
pub fn chi2_divergence(dp: &DensityPair) -> ExtReal {
    let mut total = 0.0;
    for w in 0..dp.len() {
        let q = dp.q().prob(w);
        if q == 0.0 {
            continue;
        }
        let diff = dp.beta_i()[w] - dp.beta_ii()[w];
        let num = diff * diff;
        let term = safe_ratio(num, dp.beta_ii()[w]);
        if num == 0.0 {
            continue;
        }
        if term.is_pos_infinity() {
            return ExtReal::INFINITY;
        }
        total += term.value() * q;
    }
    ExtReal::from_f64(0.5 * total)
}

/// Rényi information gain of order `alpha`, in bits.
pub fn renyi_info_gain(dp: &DensityPair, alpha: f64) -> Result<ExtReal, DivergenceError> {
    if !(alpha.is_finite() && alpha > 0.0 && alpha != 1.0) {
        return Err(DivergenceError::BadRenyiOrder(alpha));
    }
    let integral = power_integral(dp, alpha, 1.0 - alpha);
    let log2 = if integral.is_pos_infinity() {
        ExtReal::INFINITY
    } else if integral.is_zero() {
        ExtReal::NEG_INFINITY
    } else {
        ExtReal::from_f64(integral.value().log2())
    };
    let coef = 1.0 / (alpha - 1.0);
    Ok(if log2.is_finite() {
        ExtReal::from_f64(coef * log2.value())
    } else {
        // Both infinite cases are +∞: ∫ = 0 needs α < 1, ∫ = ∞ needs α > 1.
        ExtReal::INFINITY
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{mixture_densities, Distribution};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn pair(a: &[f64], b: &[f64]) -> DensityPair {
        mixture_densities(&Distribution::new(a.to_vec()).unwrap(), &Distribution::new(b.to_vec()).unwrap()).unwrap()
    }

    fn drift() -> DensityPair {
        pair(&[0.5, 0.5], &[0.9, 0.1])
    }

    fn al(a: f64) -> AlphaParam {
        AlphaParam::new(a).unwrap()
    }

    #[test]
    fn alpha_rejects_unit_values() {
        assert!(AlphaParam::new(1.0).is_err());
        assert!(AlphaParam::new(-1.0).is_err());
        assert!(AlphaParam::new(f64::NAN).is_err());
        assert!(AlphaParam::new(0.999).is_ok());
    }

    #[test]
    fn drifted_pair_values() {
        let dp = drift();
        let cases = [
            (0.0, 0.894427190999916, 0.42229123600033613, 0.44628710262841914),
            (-3.0, 2.7777777777777777, 0.8888888888888888, 0.5108256237659906),
            (0.5, 0.9265408973555275, 0.3917818807705201, 0.40691782642599256),
            (3.0, 1.64, 0.32, 0.24734812091805355),
        ];
        for (a, h, paren, bracket) in cases {
            assert_abs_diff_eq!(hellinger_integral(&dp, al(a)).value(), h, epsilon = 1e-12);
            assert_abs_diff_eq!(div_paren(&dp, al(a)).value(), paren, epsilon = 1e-12);
            assert_abs_diff_eq!(div_bracket(&dp, al(a)).value(), bracket, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(kl_divergence(&dp).value(), 0.5108256237659907, epsilon = 1e-12);
        assert_abs_diff_eq!(chi2_divergence(&dp).value(), 0.8888888888888888, epsilon = 1e-12);
        assert_abs_diff_eq!(renyi_info_gain(&dp, 0.5).unwrap().value(), 0.32192809488736207, epsilon = 1e-12);
        assert_abs_diff_eq!(renyi_info_gain(&dp, 2.0).unwrap().value(), 1.4739311883324122, epsilon = 1e-12);
    }

    #[test]
    fn identical_forecasts_have_no_divergence() {
        let dp = pair(&[0.2, 0.0, 0.8], &[0.2, 0.0, 0.8]);
        for a in [-3.0, -0.5, 0.0, 0.7, 2.0] {
            assert_abs_diff_eq!(hellinger_integral(&dp, al(a)).value(), 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(div_paren(&dp, al(a)).value(), 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(div_bracket(&dp, al(a)).value(), 0.0, epsilon = 1e-15);
        }
        assert_eq!(kl_divergence(&dp).value(), 0.0);
        assert_eq!(chi2_divergence(&dp).value(), 0.0);
        assert_abs_diff_eq!(renyi_info_gain(&dp, 2.0).unwrap().value(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn singular_pair() {
        let dp = pair(&[1.0, 0.0], &[0.0, 1.0]);
        assert_eq!(hellinger_integral(&dp, al(0.0)), ExtReal::ZERO);
        assert_eq!(div_paren(&dp, al(0.0)).value(), 4.0);
        assert!(div_bracket(&dp, al(0.0)).is_pos_infinity());
        assert!(kl_divergence(&dp).is_pos_infinity());
        assert!(chi2_divergence(&dp).is_pos_infinity());
        assert!(hellinger_integral(&dp, al(-3.0)).is_pos_infinity());
        assert!(div_paren(&dp, al(-3.0)).is_pos_infinity());
        assert!(div_bracket(&dp, al(-3.0)).is_pos_infinity());
        assert!(renyi_info_gain(&dp, 0.5).unwrap().is_pos_infinity());
        assert!(renyi_info_gain(&dp, 2.0).unwrap().is_pos_infinity());
    }

    #[test]
    fn renyi_rejects_bad_orders() {
        let dp = drift();
        assert!(renyi_info_gain(&dp, 1.0).is_err());
        assert!(renyi_info_gain(&dp, 0.0).is_err());
        assert!(renyi_info_gain(&dp, -2.0).is_err());
    }

    fn arb_full_pair() -> impl Strategy<Value = DensityPair> {
        (2usize..6).prop_flat_map(|m| {
            (proptest::collection::vec(0.01f64..1.0, m), proptest::collection::vec(0.01f64..1.0, m)).prop_map(
                |(a, b)| {
                    let sa: f64 = a.iter().sum();
                    let sb: f64 = b.iter().sum();
                    let a: Vec<f64> = a.iter().map(|x| x / sa).collect();
                    let b: Vec<f64> = b.iter().map(|x| x / sb).collect();
                    pair(&a, &b)
                },
            )
        })
    }

    fn arb_alpha() -> impl Strategy<Value = AlphaParam> {
        prop_oneof![-6.0f64..-1.01, -0.99f64..0.99, 1.01f64..6.0].prop_map(al)
    }

    proptest! {
        #[test]
        fn divergences_are_nonnegative(dp in arb_full_pair(), a in arb_alpha()) {
            prop_assert!(div_paren(&dp, a).value() >= -1e-12);
            prop_assert!(div_bracket(&dp, a).value() >= -1e-12);
            prop_assert!(kl_divergence(&dp).value() >= -1e-12);
        }

        #[test]
        fn paren_and_bracket_are_ordered(dp in arb_full_pair(), a in arb_alpha()) {
            let p = div_paren(&dp, a).value();
            let b = div_bracket(&dp, a).value();
            if a.is_small() {
                prop_assert!(p <= b + 1e-12);
            } else {
                prop_assert!(p >= b - 1e-12);
            }
        }

        #[test]
        fn chi2_is_paren_at_minus_three(dp in arb_full_pair()) {
            let c = chi2_divergence(&dp).value();
            prop_assert!((c - div_paren(&dp, al(-3.0)).value()).abs() <= 1e-12 * c.max(1.0));
        }

        #[test]
        fn mirrored_roles(a in arb_alpha(), dp in arb_full_pair()) {
            let swapped = mixture_densities(dp.p_ii(), dp.p_i()).unwrap();
            let x = div_paren(&dp, a).value();
            let y = div_paren(&swapped, a.mirrored()).value();
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }

        #[test]
        fn kl_is_limit_of_bracket(dp in arb_full_pair()) {
            let kl = kl_divergence(&dp).value();
            let near = div_bracket(&dp, al(-1.0 + 1e-6)).value();
            prop_assert!((kl - near).abs() <= 1e-4 * kl.max(1.0));
        }
    }
}
