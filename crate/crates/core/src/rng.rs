//! Uniform random numbers and deterministic hashing.
//!
//! Sampling in this crate consumes one uniform `u ∈ [0, 1)` per draw and maps
//! it through the inverse CDF of the ordered support, so a trajectory depends
//! only on the stream of uniforms and not on a particular generator.

use rand_core::RngCore;

/// A source of uniform reals in `[0, 1)`.
pub trait UniformSource {
    fn next_uniform(&mut self) -> f64;
}

/// Top 53 bits of a 64-bit word, scaled into `[0, 1)`.
impl<R: RngCore + ?Sized> UniformSource for R {
    fn next_uniform(&mut self) -> f64 {
        unit_from_bits(self.next_u64())
    }
}

pub(crate) fn unit_from_bits(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Incremental hash over a sequence of words, used to derive reproducible
/// pseudo-random tables keyed by histories.
#[derive(Debug, Clone, Copy)]
pub struct KeyHasher(u64);

impl KeyHasher {
    pub fn new(seed: u64) -> Self {
        KeyHasher(splitmix64(seed))
    }

    pub fn push(mut self, word: u64) -> Self {
        self.0 = splitmix64(self.0 ^ word.wrapping_mul(0x2545_F491_4F6C_DD1D));
        self
    }

    pub fn finish(self) -> u64 {
        self.0
    }

    /// A uniform in `(0, 1]` derived from the key and `index`.
    pub fn unit(self, index: u64) -> f64 {
        1.0 - unit_from_bits(self.push(index).finish())
    }
}
