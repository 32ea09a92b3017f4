//! Extended reals for log-probabilities and divergences.

use core::fmt;
use core::ops::{Add, AddAssign, Neg, Sub};

/// A real number extended with `-∞` and `+∞`.
///
/// Infinities are separate variants rather than IEEE infinities so that
/// `0 · ∞ = 0` can be applied deliberately (see [`ExtReal::weighted`]) and
/// adding opposite infinities is caught instead of producing NaN.
///
/// The derived ordering is the natural one: `NegInf < Finite(_) < PosInf`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0.0);

    /// Converts an IEEE value, mapping infinities onto the dedicated variants.
    ///
    /// # Panics
    /// On NaN.
    pub fn from_f64(x: f64) -> Self {
        assert!(!x.is_nan(), "NaN is not an extended real");
        if x == f64::INFINITY {
            ExtReal::PosInf
        } else if x == f64::NEG_INFINITY {
            ExtReal::NegInf
        } else {
            ExtReal::Finite(x)
        }
    }

    /// `ln p` for `p ∈ [0, 1]`, with `ln 0 = -∞`.
    pub fn ln(p: f64) -> Self {
        if p == 0.0 {
            ExtReal::NegInf
        } else {
            ExtReal::Finite(libm::log(p))
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::NegInf => f64::NEG_INFINITY,
            ExtReal::Finite(x) => x,
            ExtReal::PosInf => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    /// `e^x`, with `e^{-∞} = 0`.
    pub fn exp(self) -> f64 {
        libm::exp(self.to_f64())
    }

    /// `w · x` for a non-negative weight, with `0 · (±∞) = 0`.
    pub fn weighted(self, w: f64) -> Self {
        debug_assert!(w >= 0.0);
        if w == 0.0 {
            return ExtReal::ZERO;
        }
        match self {
            ExtReal::Finite(x) => ExtReal::Finite(w * x),
            inf => inf,
        }
    }

    /// Division by a positive count, used for time averages.
    pub fn over(self, n: f64) -> Self {
        debug_assert!(n > 0.0);
        match self {
            ExtReal::Finite(x) => ExtReal::Finite(x / n),
            inf => inf,
        }
    }

    /// Absolute difference, treating equal infinities as identical.
    pub fn abs_diff(self, other: ExtReal) -> f64 {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => libm::fabs(a - b),
            (a, b) if a == b => 0.0,
            _ => f64::INFINITY,
        }
    }
}

/// `x > 0` and finite; false for NaN.
pub fn is_positive_finite(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

impl From<f64> for ExtReal {
    fn from(x: f64) -> Self {
        ExtReal::from_f64(x)
    }
}

impl Neg for ExtReal {
    type Output = ExtReal;
    fn neg(self) -> ExtReal {
        match self {
            ExtReal::NegInf => ExtReal::PosInf,
            ExtReal::Finite(x) => ExtReal::Finite(-x),
            ExtReal::PosInf => ExtReal::NegInf,
        }
    }
}

impl Add for ExtReal {
    type Output = ExtReal;

    /// Saturating addition.
    ///
    /// # Panics
    /// When adding `+∞` and `-∞`.
    fn add(self, rhs: ExtReal) -> ExtReal {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            (ExtReal::NegInf, ExtReal::PosInf) | (ExtReal::PosInf, ExtReal::NegInf) => {
                panic!("indeterminate sum of opposite infinities")
            }
            (ExtReal::NegInf, _) | (_, ExtReal::NegInf) => ExtReal::NegInf,
            _ => ExtReal::PosInf,
        }
    }
}

impl Sub for ExtReal {
    type Output = ExtReal;
    fn sub(self, rhs: ExtReal) -> ExtReal {
        self + (-rhs)
    }
}

impl AddAssign for ExtReal {
    fn add_assign(&mut self, rhs: ExtReal) {
        *self = *self + rhs;
    }
}

impl core::iter::Sum for ExtReal {
    fn sum<I: Iterator<Item = ExtReal>>(iter: I) -> ExtReal {
        iter.fold(ExtReal::ZERO, |acc, x| acc + x)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => f.write_str("-inf"),
            ExtReal::Finite(x) => fmt::Display::fmt(x, f),
            ExtReal::PosInf => f.write_str("inf"),
        }
    }
}
