//! Extended-real arithmetic.
//!
//! Capitals and payoffs live in `[0, ∞]`, log-capitals in `[−∞, ∞]`. The
//! conventions used throughout the crate are:
//!
//! * `0 · ∞ = 0`
//! * `0 / 0 = 1` and `t / 0 = ∞` for `t > 0` (density ratios)
//! * `ln 0 = −∞`, `ln ∞ = ∞`, `exp(−∞) = 0`, `exp(∞) = ∞`
//!
//! A sum of the form `∞ − ∞` is never collapsed to a number; it is carried as
//! [`LogCapital::Indefinite`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Div, Mul};

use serde::{Deserialize, Serialize};

/// A real number or `±∞`. Never NaN.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ExtReal(f64);

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal(0.0);
    pub const ONE: ExtReal = ExtReal(1.0);
    pub const INFINITY: ExtReal = ExtReal(f64::INFINITY);
    pub const NEG_INFINITY: ExtReal = ExtReal(f64::NEG_INFINITY);

    /// Returns `None` for NaN.
    pub fn new(x: f64) -> Option<Self> {
        if x.is_nan() {
            None
        } else {
            Some(ExtReal(x))
        }
    }

    /// Wraps a value already known not to be NaN.
    ///
    /// # Panics
    ///
    /// Panics on NaN.
    pub fn from_f64(x: f64) -> Self {
        Self::new(x).expect("ExtReal cannot hold NaN")
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    #[inline]
    pub fn is_pos_infinity(self) -> bool {
        self.0 == f64::INFINITY
    }

    #[inline]
    pub fn is_neg_infinity(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0.0
    }

    /// Natural logarithm of a nonnegative value, with `ln 0 = −∞`.
    ///
    /// # Panics
    ///
    /// Panics if `self < 0`.
    pub fn ln(self) -> ExtReal {
        assert!(self.0 >= 0.0, "logarithm of a negative value {}", self.0);
        ExtReal(self.0.ln())
    }

    pub fn exp(self) -> ExtReal {
        ExtReal(self.0.exp())
    }

    /// `self^e` for nonnegative `self`, with `0^0 = 1`, `0^(−e) = ∞`,
    /// `∞^(−e) = 0` and `∞^0 = 1`.
    pub fn powf(self, e: f64) -> ExtReal {
        debug_assert!(self.0 >= 0.0);
        // IEEE powf already follows these conventions for nonnegative bases.
        ExtReal(self.0.powf(e))
    }

    /// Sum that reports `∞ − ∞` as `None`.
    pub fn checked_add(self, other: ExtReal) -> Option<ExtReal> {
        ExtReal::new(self.0 + other.0)
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// Total order (there is no NaN to break it).
    pub fn total_cmp(&self, other: &ExtReal) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl From<ExtReal> for f64 {
    fn from(x: ExtReal) -> f64 {
        x.0
    }
}

impl TryFrom<f64> for ExtReal {
    type Error = &'static str;

    fn try_from(x: f64) -> Result<Self, Self::Error> {
        ExtReal::new(x).ok_or("NaN is not an extended real")
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_pos_infinity() {
            f.write_str("inf")
        } else if self.is_neg_infinity() {
            f.write_str("-inf")
        } else {
            fmt::Display::fmt(&self.0, f)
        }
    }
}

impl Mul for ExtReal {
    type Output = ExtReal;

    fn mul(self, rhs: ExtReal) -> ExtReal {
        ext_mul(self, rhs)
    }
}

impl Div for ExtReal {
    type Output = ExtReal;

    /// Plain IEEE division; use [`safe_ratio`] for density ratios.
    fn div(self, rhs: ExtReal) -> ExtReal {
        ExtReal::from_f64(self.0 / rhs.0)
    }
}

/// Product with `0 · ∞ = 0`.
pub fn ext_mul(a: ExtReal, b: ExtReal) -> ExtReal {
    if a.0 == 0.0 || b.0 == 0.0 {
        ExtReal::ZERO
    } else {
        ExtReal(a.0 * b.0)
    }
}

/// Ratio of nonnegative numbers with `0/0 = 1` and `t/0 = ∞`.
pub fn safe_ratio(num: f64, den: f64) -> ExtReal {
    debug_assert!(num >= 0.0 && den >= 0.0);
    if den == 0.0 {
        if num == 0.0 {
            ExtReal::ONE
        } else {
            ExtReal::INFINITY
        }
    } else {
        ExtReal(num / den)
    }
}

/// The truncation `U(x) = min(x, 1)`.
#[inline]
pub fn truncate_at_one(x: f64) -> f64 {
    x.min(1.0)
}

/// `x⁺ = max(x, 0)`.
#[inline]
pub fn pos_part(x: f64) -> f64 {
    x.max(0.0)
}

/// Natural logarithm of a nonnegative capital.
///
/// `Value(−∞)` is capital 0 and `Value(∞)` is capital ∞. Once `+∞` and `−∞`
/// meet the state becomes `Indefinite` and stays there.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum LogCapital {
    Value(ExtReal),
    Indefinite,
}

impl Default for LogCapital {
    fn default() -> Self {
        LogCapital::ZERO
    }
}

impl LogCapital {
    /// `ln 1`, the initial capital of every Sceptic.
    pub const ZERO: LogCapital = LogCapital::Value(ExtReal::ZERO);

    pub fn from_capital(k: ExtReal) -> LogCapital {
        LogCapital::Value(k.ln())
    }

    pub fn from_log(x: f64) -> LogCapital {
        LogCapital::Value(ExtReal::from_f64(x))
    }

    /// Multiplies the underlying capital by a payoff `f ≥ 0`.
    pub fn update(self, payoff: ExtReal) -> LogCapital {
        self.add_log(payoff.ln())
    }

    /// Adds `x` to the logarithm.
    pub fn add_log(self, x: ExtReal) -> LogCapital {
        match self {
            LogCapital::Indefinite => LogCapital::Indefinite,
            LogCapital::Value(v) => match v.checked_add(x) {
                Some(s) => LogCapital::Value(s),
                None => LogCapital::Indefinite,
            },
        }
    }

    /// Sum of two log-quantities, `Indefinite` on `∞ − ∞`.
    pub fn sum(self, other: LogCapital) -> LogCapital {
        match other {
            LogCapital::Indefinite => LogCapital::Indefinite,
            LogCapital::Value(x) => self.add_log(x),
        }
    }

    /// Multiplies the log by a nonzero finite coefficient.
    pub fn scale(self, coef: f64) -> LogCapital {
        debug_assert!(coef != 0.0 && coef.is_finite());
        match self {
            LogCapital::Indefinite => LogCapital::Indefinite,
            LogCapital::Value(v) => LogCapital::Value(ExtReal(v.0 * coef)),
        }
    }

    pub fn value(self) -> Option<ExtReal> {
        match self {
            LogCapital::Value(v) => Some(v),
            LogCapital::Indefinite => None,
        }
    }

    pub fn is_indefinite(self) -> bool {
        matches!(self, LogCapital::Indefinite)
    }

    pub fn is_finite(self) -> bool {
        matches!(self, LogCapital::Value(v) if v.is_finite())
    }

    /// The capital `exp(log)`; `None` when indefinite.
    pub fn capital(self) -> Option<ExtReal> {
        self.value().map(ExtReal::exp)
    }
}

impl fmt::Display for LogCapital {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogCapital::Value(v) => fmt::Display::fmt(v, f),
            LogCapital::Indefinite => f.write_str("indefinite"),
        }
    }
}
