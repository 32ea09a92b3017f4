//! Finite-alphabet stochastic processes given by their next-symbol conditionals.

use alloc::vec::Vec;

use crate::entropy::entropy;
use crate::reward::{utility_of_string, ProcessString};
use crate::rng::{KeyHasher, UniformSource};
use crate::{Error, ExtReal, FiniteDistribution, Symbol};

/// A process over `{0, …, n-1}` specified by `P(x_t | x_<t)`.
///
/// `P(x_≤t) = Π P(x_τ | x_<τ)` is normalized by construction.
pub trait StochasticProcess {
    fn alphabet_size(&self) -> usize;

    /// Distribution of the next symbol after `prefix`, over `0..alphabet_size()`.
    fn conditional(&self, prefix: &[Symbol]) -> FiniteDistribution;
}

/// Attaches the per-step conditionals to `symbols`.
pub fn evaluate<P: StochasticProcess + ?Sized>(process: &P, symbols: &[Symbol]) -> ProcessString {
    let conditionals = (0..symbols.len())
        .map(|i| process.conditional(&symbols[..i]).p(symbols[i]))
        .collect();
    ProcessString::new(symbols.to_vec(), conditionals).expect("conditionals are probabilities")
}

/// `n^t` as a checked count.
pub(crate) fn string_count(n: usize, t: usize, budget: u128) -> Result<usize, Error> {
    let mut required: u128 = 1;
    for _ in 0..t {
        required = required.saturating_mul(n as u128);
    }
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    Ok(required as usize)
}

/// Visits every string of length `t` in lexicographic order, zero-probability
/// strings included.
pub fn for_each_string<P, F>(process: &P, t: usize, budget: u128, mut visit: F) -> Result<(), Error>
where
    P: StochasticProcess + ?Sized,
    F: FnMut(&ProcessString),
{
    string_count(process.alphabet_size(), t, budget)?;
    let mut symbols = Vec::with_capacity(t);
    let mut conditionals = Vec::with_capacity(t);
    walk(process, t, &mut symbols, &mut conditionals, &mut visit);
    Ok(())
}

fn walk<P, F>(process: &P, t: usize, symbols: &mut Vec<Symbol>, conditionals: &mut Vec<f64>, visit: &mut F)
where
    P: StochasticProcess + ?Sized,
    F: FnMut(&ProcessString),
{
    if symbols.len() == t {
        let s = ProcessString::new(symbols.clone(), conditionals.clone()).expect("valid");
        visit(&s);
        return;
    }
    let next = process.conditional(symbols);
    for (&x, p) in next.iter() {
        symbols.push(x);
        conditionals.push(p);
        walk(process, t, symbols, conditionals, visit);
        symbols.pop();
        conditionals.pop();
    }
}

/// The distribution of `x_≤t`, indexed by lexicographic string rank.
pub fn string_distribution<P: StochasticProcess + ?Sized>(
    process: &P,
    t: usize,
    budget: u128,
) -> Result<FiniteDistribution, Error> {
    let mut probs = Vec::new();
    for_each_string(process, t, budget, |s| probs.push(s.probability()))?;
    FiniteDistribution::over_indices(probs)
}

/// `E[U(x_≤t)] = Σ P(x_≤t) U(x_≤t)`, with `0 · (-∞) = 0`.
pub fn expected_utility<P: StochasticProcess + ?Sized>(
    process: &P,
    t: usize,
    budget: u128,
) -> Result<ExtReal, Error> {
    if t == 0 {
        return Err(Error::EmptyString);
    }
    let mut total = ExtReal::ZERO;
    for_each_string(process, t, budget, |s| {
        let u = utility_of_string(s).expect("t > 0");
        total += u.weighted(s.probability());
    })?;
    Ok(total)
}

/// `(1/t) H[P(x_≤t)]`, from the entropy of the full string distribution.
pub fn entropy_rate<P: StochasticProcess + ?Sized>(process: &P, t: usize, budget: u128) -> Result<f64, Error> {
    if t == 0 {
        return Err(Error::EmptyString);
    }
    Ok(entropy(&string_distribution(process, t, budget)?) / t as f64)
}

/// Draws `x_≤t` symbol by symbol through inverse-CDF sampling.
pub fn sample_string<P, R>(process: &P, t: usize, rng: &mut R) -> ProcessString
where
    P: StochasticProcess + ?Sized,
    R: UniformSource + ?Sized,
{
    let mut symbols = Vec::with_capacity(t);
    let mut conditionals = Vec::with_capacity(t);
    for _ in 0..t {
        let next = process.conditional(&symbols);
        let i = next.sample_index(rng.next_uniform());
        symbols.push(next.support()[i]);
        conditionals.push(next.probs()[i]);
    }
    ProcessString::new(symbols, conditionals).expect("valid")
}

/// Memoryless process with a fixed next-symbol distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct IidProcess(pub FiniteDistribution);

impl StochasticProcess for IidProcess {
    fn alphabet_size(&self) -> usize {
        self.0.len()
    }

    fn conditional(&self, _prefix: &[Symbol]) -> FiniteDistribution {
        self.0.clone()
    }
}

/// A process whose conditionals are pseudo-random functions of the whole
/// prefix, reproducible from `seed`.
///
/// With `sparse` set, roughly a quarter of the symbols get probability zero at
/// each prefix (never all of them).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomProcess {
    pub alphabet: usize,
    pub seed: u64,
    pub sparse: bool,
}

impl RandomProcess {
    pub fn new(alphabet: usize, seed: u64) -> Self {
        RandomProcess { alphabet, seed, sparse: false }
    }
}

impl StochasticProcess for RandomProcess {
    fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    fn conditional(&self, prefix: &[Symbol]) -> FiniteDistribution {
        let key = prefix
            .iter()
            .fold(KeyHasher::new(self.seed).push(prefix.len() as u64), |h, &x| h.push(x as u64));
        random_weights(key, self.alphabet, self.sparse)
    }
}

pub(crate) fn random_weights(key: KeyHasher, n: usize, sparse: bool) -> FiniteDistribution {
    let mut weights: Vec<f64> = (0..n as u64).map(|i| key.unit(i)).collect();
    if sparse {
        let keep = (0..n)
            .max_by(|&a, &b| weights[a].total_cmp(&weights[b]))
            .expect("non-empty alphabet");
        for (i, w) in weights.iter_mut().enumerate() {
            if i != keep && key.unit(1_000 + i as u64) < 0.25 {
                *w = 0.0;
            }
        }
    }
    FiniteDistribution::from_weights((0..n as Symbol).collect(), &weights).expect("positive weights")
}
