use core::fmt;

/// Errors raised by the library surface.
///
/// Most variants flag a caller bug (mismatched supports, probabilities outside
/// the unit interval); `BudgetExceeded` is the only one a caller is expected to
/// recover from.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A probability was negative, above one, or not finite.
    InvalidProbability(f64),
    /// Probabilities do not sum to one within tolerance.
    NotNormalized { sum: f64 },
    /// `support` and `probs` have different lengths.
    LengthMismatch { support: usize, probs: usize },
    /// A distribution was built over an empty support.
    EmptySupport,
    /// The same symbol appears twice in a support list.
    DuplicateSymbol,
    /// Two distributions that must be compared positionally have different supports.
    SupportMismatch,
    /// A conditioning value with positive probability has no conditional distribution.
    MissingConditional { index: usize },
    /// The reward scale `k` must be strictly positive and finite.
    InvalidScale(f64),
    /// The inverse temperature must be strictly positive and finite.
    InvalidAlpha(f64),
    /// A desirability value was not finite.
    NonFiniteDesirability { index: usize },
    /// A desirability map without outcomes.
    EmptyOutcomes,
    /// The events of a union carry more than unit total probability.
    DisjointnessViolation { total: f64 },
    /// Utility requested for a string of zero length.
    EmptyString,
    /// Rewards are never positive.
    PositiveReward(f64),
    /// Utility values are never positive.
    PositiveUtility(f64),
    /// A symbol is not part of the alphabet.
    UnknownSymbol(Symbol),
    /// An exact enumeration would visit more histories than allowed.
    BudgetExceeded { required: u128, budget: u128 },
    /// Any other out-of-domain parameter.
    InvalidParameter(&'static str),
}

use crate::Symbol;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidProbability(p) => write!(f, "probability {p} outside [0, 1]"),
            Error::NotNormalized { sum } => write!(f, "probabilities sum to {sum}, expected 1"),
            Error::LengthMismatch { support, probs } => {
                write!(f, "support has {support} symbols but {probs} probabilities were given")
            }
            Error::EmptySupport => f.write_str("empty support"),
            Error::DuplicateSymbol => f.write_str("duplicate symbol in support"),
            Error::SupportMismatch => f.write_str("distributions have different supports"),
            Error::MissingConditional { index } => {
                write!(f, "no conditional distribution for conditioning value #{index}")
            }
            Error::InvalidScale(k) => write!(f, "reward scale must be positive, got {k}"),
            Error::InvalidAlpha(a) => write!(f, "inverse temperature must be positive, got {a}"),
            Error::NonFiniteDesirability { index } => {
                write!(f, "desirability of outcome #{index} is not finite")
            }
            Error::EmptyOutcomes => f.write_str("desirability map has no outcomes"),
            Error::DisjointnessViolation { total } => {
                write!(f, "union of events has total probability {total} > 1; events are not disjoint")
            }
            Error::EmptyString => f.write_str("utility of the empty string is not computed"),
            Error::PositiveReward(r) => write!(f, "reward {r} is positive"),
            Error::PositiveUtility(u) => write!(f, "utility {u} is positive"),
            Error::UnknownSymbol(s) => write!(f, "symbol {s} is not in the alphabet"),
            Error::BudgetExceeded { required, budget } => write!(
                f,
                "enumeration needs {required} histories, budget is {budget}"
            ),
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
        }
    }
}

impl core::error::Error for Error {}
