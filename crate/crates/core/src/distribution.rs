//! Probability distributions over finite, ordered supports.

use alloc::vec::Vec;

use crate::Error;

/// Index of a symbol in an ordered alphabet.
pub type Symbol = u32;

/// Tolerance on `Σ p = 1` for every distribution the library accepts.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Probabilities over a finite ordered support.
///
/// Two distributions are compared positionally, so operations that combine
/// distributions (KL, cross-entropy) require identical support lists.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDistribution<S = Symbol> {
    support: Vec<S>,
    probs: Vec<f64>,
}

impl<S> FiniteDistribution<S> {
    pub fn support(&self) -> &[S] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&S, f64)> + '_ {
        self.support.iter().zip(self.probs.iter().copied())
    }
}

impl<S: PartialEq> FiniteDistribution<S> {
    /// Validates and wraps `probs` over `support`.
    pub fn new(support: Vec<S>, probs: Vec<f64>) -> Result<Self, Error> {
        if support.len() != probs.len() {
            return Err(Error::LengthMismatch { support: support.len(), probs: probs.len() });
        }
        if support.is_empty() {
            return Err(Error::EmptySupport);
        }
        for (i, s) in support.iter().enumerate() {
            if support[..i].contains(s) {
                return Err(Error::DuplicateSymbol);
            }
        }
        Self::with_distinct_support(support, probs)
    }

    fn with_distinct_support(support: Vec<S>, probs: Vec<f64>) -> Result<Self, Error> {
        if probs.is_empty() {
            return Err(Error::EmptySupport);
        }
        let mut sum = 0.0;
        for &p in &probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidProbability(p));
            }
            sum += p;
        }
        if libm::fabs(sum - 1.0) > NORMALIZATION_TOL {
            return Err(Error::NotNormalized { sum });
        }
        Ok(FiniteDistribution { support, probs })
    }

    /// Normalizes non-negative weights into a distribution.
    pub fn from_weights(support: Vec<S>, weights: &[f64]) -> Result<Self, Error> {
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) || total <= 0.0 {
            return Err(Error::InvalidParameter("weights must be finite, non-negative and not all zero"));
        }
        Self::new(support, weights.iter().map(|w| w / total).collect())
    }

    /// Probability of `symbol`, or `None` when it is outside the support.
    pub fn prob_of(&self, symbol: &S) -> Option<f64> {
        self.support.iter().position(|s| s == symbol).map(|i| self.probs[i])
    }

    pub fn same_support(&self, other: &Self) -> bool {
        self.support == other.support
    }

    /// Whether all mass sits on a single symbol.
    pub fn is_point_mass(&self) -> bool {
        self.probs.contains(&1.0)
    }

    /// Inverse-CDF sampling over the ordered support.
    ///
    /// Returns the first position whose cumulative mass exceeds `u ∈ [0, 1)`.
    /// Zero-probability symbols are never returned; when rounding leaves `u`
    /// beyond the accumulated total, the last positive-mass symbol is used.
    pub fn sample_index(&self, u: f64) -> usize {
        let mut cumulative = 0.0;
        let mut last_positive = 0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p > 0.0 {
                cumulative += p;
                last_positive = i;
                if u < cumulative {
                    return i;
                }
            }
        }
        last_positive
    }
}

impl FiniteDistribution<Symbol> {
    /// Distribution over the symbols `0..probs.len()`.
    pub fn over_indices(probs: Vec<f64>) -> Result<Self, Error> {
        let support = (0..probs.len() as Symbol).collect();
        Self::with_distinct_support(support, probs)
    }

    /// Two-symbol distribution with `P(0) = p`, `P(1) = 1 - p`.
    pub fn bernoulli(p: f64) -> Result<Self, Error> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        Self::over_indices(alloc::vec![p, 1.0 - p])
    }

    pub fn uniform(n: usize) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::EmptySupport);
        }
        Self::over_indices(alloc::vec![1.0 / n as f64; n])
    }

    pub fn point_mass(n: usize, at: Symbol) -> Result<Self, Error> {
        if at as usize >= n {
            return Err(Error::UnknownSymbol(at));
        }
        let mut probs = alloc::vec![0.0; n];
        probs[at as usize] = 1.0;
        Self::over_indices(probs)
    }

    /// Probability of symbol `s`, zero outside the support.
    pub fn p(&self, s: Symbol) -> f64 {
        self.prob_of(&s).unwrap_or(0.0)
    }
}
