//! Entropy and relative entropy of finite distributions, including the
//! average conditional forms `H[p(x|y)]` and `D[p₁(x|y) ‖ p₂(x|y)]`.
//!
//! All values are in nats. `0 · ln 0 = 0` is applied by an explicit branch.

use alloc::vec::Vec;

use crate::{Error, ExtReal, FiniteDistribution};

/// `-Σ p ln p`.
pub fn entropy<S>(d: &FiniteDistribution<S>) -> f64 {
    let h: f64 = d
        .probs()
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * libm::log(p))
        .sum();
    // single-term rounding can leave -0.0 or a tiny negative
    h.max(0.0)
}

/// `Σ p ln(p / q)`; `+∞` when `q` misses mass that `p` has.
pub fn kl<S: PartialEq>(p: &FiniteDistribution<S>, q: &FiniteDistribution<S>) -> Result<ExtReal, Error> {
    if !p.same_support(q) {
        return Err(Error::SupportMismatch);
    }
    let mut total = 0.0;
    for (&pp, &qq) in p.probs().iter().zip(q.probs()) {
        if pp == 0.0 {
            continue;
        }
        if qq == 0.0 {
            return Ok(ExtReal::PosInf);
        }
        total += pp * libm::log(pp / qq);
    }
    Ok(ExtReal::Finite(total.max(0.0)))
}

/// `-Σ p ln q`, the expected surprisal of `q` under `p`.
pub fn cross_entropy<S: PartialEq>(
    p: &FiniteDistribution<S>,
    q: &FiniteDistribution<S>,
) -> Result<ExtReal, Error> {
    if !p.same_support(q) {
        return Err(Error::SupportMismatch);
    }
    Ok(p
        .probs()
        .iter()
        .zip(q.probs())
        .map(|(&pp, &qq)| -ExtReal::ln(qq).weighted(pp))
        .sum())
}

/// A joint distribution over `X × Y` stored as `p(y) · p(x|y)`.
///
/// Conditionals are indexed positionally by the outer support. Conditioning
/// values with zero outer mass may omit their conditional.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution<X, Y = crate::Symbol> {
    outer: FiniteDistribution<Y>,
    conditionals: Vec<Option<FiniteDistribution<X>>>,
}

impl<X: PartialEq, Y: PartialEq> JointDistribution<X, Y> {
    pub fn new(
        outer: FiniteDistribution<Y>,
        conditionals: Vec<Option<FiniteDistribution<X>>>,
    ) -> Result<Self, Error> {
        if conditionals.len() != outer.len() {
            return Err(Error::LengthMismatch { support: outer.len(), probs: conditionals.len() });
        }
        let mut reference: Option<&FiniteDistribution<X>> = None;
        let mut total = 0.0;
        for (i, (&py, cond)) in outer.probs().iter().zip(&conditionals).enumerate() {
            match cond {
                None if py > 0.0 => return Err(Error::MissingConditional { index: i }),
                None => {}
                Some(c) => {
                    match reference {
                        Some(r) if !r.same_support(c) => return Err(Error::SupportMismatch),
                        Some(_) => {}
                        None => reference = Some(c),
                    }
                    total += c.probs().iter().map(|px| py * px).sum::<f64>();
                }
            }
        }
        if libm::fabs(total - 1.0) > crate::distribution::NORMALIZATION_TOL {
            return Err(Error::NotNormalized { sum: total });
        }
        Ok(JointDistribution { outer, conditionals })
    }

    /// The same conditional for every outer value (independence).
    pub fn independent(outer: FiniteDistribution<Y>, conditional: FiniteDistribution<X>) -> Self
    where
        X: Clone,
    {
        let conditionals = (0..outer.len()).map(|_| Some(conditional.clone())).collect();
        JointDistribution { outer, conditionals }
    }

    pub fn outer(&self) -> &FiniteDistribution<Y> {
        &self.outer
    }

    pub fn conditional(&self, index: usize) -> Option<&FiniteDistribution<X>> {
        self.conditionals.get(index).and_then(Option::as_ref)
    }

    pub fn conditionals(&self) -> &[Option<FiniteDistribution<X>>] {
        &self.conditionals
    }

    /// Flattens into `p(y, x)` over the product of supports, `y` major.
    pub fn joint(&self) -> Result<FiniteDistribution<(Y, X)>, Error>
    where
        X: Clone,
        Y: Clone,
    {
        let mut support = Vec::new();
        let mut probs = Vec::new();
        for (y, py) in self.outer.iter() {
            let Some(cond) = self.positional(y) else { continue };
            for (x, px) in cond.iter() {
                support.push((y.clone(), x.clone()));
                probs.push(py * px);
            }
        }
        FiniteDistribution::new(support, probs)
    }

    fn positional(&self, y: &Y) -> Option<&FiniteDistribution<X>> {
        let i = self.outer.support().iter().position(|s| s == y)?;
        self.conditional(i)
    }
}

/// `H[p(x|y)] = -Σ_{x,y} p(x,y) ln p(x|y)`.
pub fn conditional_entropy<X: PartialEq, Y: PartialEq>(j: &JointDistribution<X, Y>) -> f64 {
    j.outer
        .probs()
        .iter()
        .zip(&j.conditionals)
        .filter(|(&py, _)| py > 0.0)
        .map(|(&py, cond)| py * entropy(cond.as_ref().expect("validated")))
        .sum()
}

/// `D[p₁(x|y) ‖ p₂(x|y)] = Σ_{x,y} p₁(x,y) ln(p₁(x|y) / p₂(x|y))`, weighted by `j`.
///
/// `q_conditionals` is indexed like `j`'s outer support and must cover every
/// conditioning value with positive mass.
pub fn conditional_kl<X: PartialEq, Y: PartialEq>(
    j: &JointDistribution<X, Y>,
    q_conditionals: &[Option<FiniteDistribution<X>>],
) -> Result<ExtReal, Error> {
    if q_conditionals.len() != j.outer.len() {
        return Err(Error::SupportMismatch);
    }
    let mut total = ExtReal::ZERO;
    for (i, &py) in j.outer.probs().iter().enumerate() {
        if py == 0.0 {
            continue;
        }
        let p = j.conditionals[i].as_ref().expect("validated");
        let q = q_conditionals[i].as_ref().ok_or(Error::MissingConditional { index: i })?;
        total += kl(p, q)?.weighted(py);
    }
    Ok(total)
}
