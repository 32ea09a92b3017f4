//! Rewards as log-probabilities and utilities as reward rates.
//!
//! A reward function that is real-valued, additive over the chain rule and
//! order-preserving in probability is `r(x|y) = k ln P(x|y)` for some `k > 0`.
//! The crate uses `k = 1` (nats) throughout; [`RewardFunction`] carries `k` so
//! the whole family stays representable.
//!
//! Rewards live in `[-∞, 0]`: certain events are worth `0` and impossible ones
//! `-∞`. The complement and disjoint-union rules below work on `k = 1`
//! rewards, where `e^r` is a probability.

use alloc::vec::Vec;

use crate::{Error, ExtReal, FiniteDistribution};

/// Tolerance on `Σ e^{r_i} ≤ 1` when taking the union of disjoint events.
pub const DISJOINTNESS_TOL: f64 = 1e-12;

/// A reward in `[-∞, 0]` (nats).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RewardValue(ExtReal);

impl RewardValue {
    /// The reward of the sure event.
    pub const CERTAIN: RewardValue = RewardValue(ExtReal::ZERO);
    /// The reward of the impossible event.
    pub const IMPOSSIBLE: RewardValue = RewardValue(ExtReal::NegInf);

    pub fn new(value: ExtReal) -> Result<Self, Error> {
        match value {
            ExtReal::PosInf => Err(Error::PositiveReward(f64::INFINITY)),
            ExtReal::Finite(x) if x > 0.0 => Err(Error::PositiveReward(x)),
            v => Ok(RewardValue(v)),
        }
    }

    pub fn value(self) -> ExtReal {
        self.0
    }

    /// `e^r`, the probability behind a `k = 1` reward.
    pub fn probability(self) -> f64 {
        self.0.exp()
    }
}

/// `r(x|y) = k ln P(x|y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardFunction {
    k: f64,
}

impl Default for RewardFunction {
    fn default() -> Self {
        RewardFunction { k: 1.0 }
    }
}

impl RewardFunction {
    pub fn new(k: f64) -> Result<Self, Error> {
        if !crate::ext::is_positive_finite(k) {
            return Err(Error::InvalidScale(k));
        }
        Ok(RewardFunction { k })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn reward(&self, p: f64) -> Result<RewardValue, Error> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        Ok(RewardValue(ExtReal::ln(p).weighted(self.k)))
    }
}

/// The natural-log reward `ln p`.
pub fn reward(p: f64) -> Result<RewardValue, Error> {
    RewardFunction::default().reward(p)
}

/// Reward of the complementary event: `ln(1 - e^r)`.
pub fn reward_complement(r: RewardValue) -> RewardValue {
    let value = match r.0 {
        ExtReal::NegInf => ExtReal::ZERO,
        ExtReal::Finite(0.0) => ExtReal::NegInf,
        ExtReal::Finite(x) => ExtReal::Finite(log1m_exp(x)),
        ExtReal::PosInf => unreachable!("rewards are never positive"),
    };
    RewardValue(value)
}

/// `ln(1 - e^x)` for `x < 0`, switching between `expm1` and `log1p` at `-ln 2`.
fn log1m_exp(x: f64) -> f64 {
    if x > -core::f64::consts::LN_2 {
        libm::log(-libm::expm1(x))
    } else {
        libm::log1p(-libm::exp(x))
    }
}

/// Reward of a union of disjoint events: `ln Σ e^{r_i}`.
///
/// Uses a max-shifted log-sum-exp. The empty union is the impossible event.
pub fn reward_union(rs: &[RewardValue]) -> Result<RewardValue, Error> {
    let Some(max) = rs.iter().map(|r| r.0).reduce(|a, b| if b > a { b } else { a }) else {
        return Ok(RewardValue::IMPOSSIBLE);
    };
    let ExtReal::Finite(m) = max else {
        return Ok(RewardValue::IMPOSSIBLE);
    };
    let shifted: f64 = rs
        .iter()
        .map(|r| match r.0 {
            ExtReal::Finite(x) => libm::exp(x - m),
            _ => 0.0,
        })
        .sum();
    let lse = m + libm::log(shifted);
    let total = libm::exp(lse);
    if total > 1.0 + DISJOINTNESS_TOL {
        return Err(Error::DisjointnessViolation { total });
    }
    Ok(RewardValue(ExtReal::Finite(lse.min(0.0))))
}

/// Bounded-above desirabilities `d(ω)` over a finite outcome set.
#[derive(Debug, Clone, PartialEq)]
pub struct DesirabilityMap<O> {
    outcomes: Vec<O>,
    values: Vec<f64>,
}

impl<O: PartialEq> DesirabilityMap<O> {
    pub fn new(outcomes: Vec<O>, values: Vec<f64>) -> Result<Self, Error> {
        if outcomes.len() != values.len() {
            return Err(Error::LengthMismatch { support: outcomes.len(), probs: values.len() });
        }
        if outcomes.is_empty() {
            return Err(Error::EmptyOutcomes);
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteDesirability { index });
        }
        for (i, o) in outcomes.iter().enumerate() {
            if outcomes[..i].contains(o) {
                return Err(Error::DuplicateSymbol);
            }
        }
        Ok(DesirabilityMap { outcomes, values })
    }

    pub fn outcomes(&self) -> &[O] {
        &self.outcomes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Rewards and the induced Gibbs measure for a desirability map.
#[derive(Debug, Clone, PartialEq)]
pub struct GibbsResult<O> {
    pub distribution: FiniteDistribution<O>,
    /// `α d(ω) + β`, aligned with the distribution's support.
    pub rewards: Vec<RewardValue>,
    /// Inverse temperature.
    pub alpha: f64,
    /// `-ln Σ e^{α d(ω')}`.
    pub beta: f64,
}

impl<O> GibbsResult<O> {
    pub fn temperature(&self) -> f64 {
        1.0 / self.alpha
    }
}

/// Converts desirabilities into rewards by the positive affine map
/// `r(ω) = α d(ω) + β`, where `β` normalizes `e^r` into a distribution.
///
/// Order is preserved: `d(ω) > d(ω') ⇔ r(ω) > r(ω')`. Outcomes whose reward
/// falls below roughly `-745` get probability zero in `f64`.
pub fn gibbs_transform<O: PartialEq + Clone>(
    dm: &DesirabilityMap<O>,
    alpha: f64,
) -> Result<GibbsResult<O>, Error> {
    if !crate::ext::is_positive_finite(alpha) {
        return Err(Error::InvalidAlpha(alpha));
    }
    let scaled: Vec<f64> = dm.values.iter().map(|d| alpha * d).collect();
    let max = scaled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_z = max + libm::log(scaled.iter().map(|s| libm::exp(s - max)).sum::<f64>());
    let beta = -log_z;
    let rewards: Vec<f64> = scaled.iter().map(|s| s + beta).collect();
    let probs: Vec<f64> = rewards.iter().map(|&r| libm::exp(r)).collect();
    let distribution = FiniteDistribution::new(dm.outcomes.clone(), probs)?;
    let rewards = rewards
        .into_iter()
        .map(|r| RewardValue(ExtReal::Finite(r.min(0.0))))
        .collect();
    Ok(GibbsResult { distribution, rewards, alpha, beta })
}

/// A finite string together with the conditional probability of each symbol
/// given its prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessString<S = crate::Symbol> {
    symbols: Vec<S>,
    conditionals: Vec<f64>,
}

impl<S> ProcessString<S> {
    pub fn new(symbols: Vec<S>, conditionals: Vec<f64>) -> Result<Self, Error> {
        if symbols.len() != conditionals.len() {
            return Err(Error::LengthMismatch { support: symbols.len(), probs: conditionals.len() });
        }
        if let Some(&p) = conditionals.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidProbability(p));
        }
        Ok(ProcessString { symbols, conditionals })
    }

    pub fn symbols(&self) -> &[S] {
        &self.symbols
    }

    pub fn conditionals(&self) -> &[f64] {
        &self.conditionals
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// `Π P(x_τ | x_<τ)`.
    pub fn probability(&self) -> f64 {
        self.conditionals.iter().product()
    }
}

/// `U(x_≤t) = (1/t) Σ ln P(x_τ | x_<τ)`; `-∞` when any conditional is zero.
///
/// The empty string is rejected: its utility is the constant `0` and carries no
/// information about a rate.
pub fn utility_of_string<S>(s: &ProcessString<S>) -> Result<ExtReal, Error> {
    if s.is_empty() {
        return Err(Error::EmptyString);
    }
    let total: ExtReal = s.conditionals.iter().map(|&p| ExtReal::ln(p)).sum();
    Ok(total.over(s.len() as f64))
}

/// `P(x_≤t) = exp(t · U(x_≤t))`.
pub fn probability_from_utility(u: ExtReal, t: usize) -> Result<f64, Error> {
    if t == 0 {
        return Err(Error::InvalidParameter("string length must be positive"));
    }
    match u {
        ExtReal::NegInf => Ok(0.0),
        ExtReal::Finite(x) if x <= 0.0 => Ok(libm::exp(t as f64 * x)),
        other => Err(Error::PositiveUtility(other.to_f64())),
    }
}
