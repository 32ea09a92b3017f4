//! Information-theoretic rewards and utilities for finite-alphabet processes.
//!
//! Rewards are log-probabilities (`r = k ln p`, nats), utilities are reward
//! rates, and an agent coupled to an environment is analysed through the
//! entropy and relative-entropy terms of the generative distribution that
//! governs the interaction stream.
//!
//! The crate is `no_std` and only needs `alloc`. Randomness enters through the
//! [`rng::UniformSource`] trait, which is implemented for every
//! [`rand_core::RngCore`].

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod agents;
pub mod analysis;
pub mod distribution;
pub mod entropy;
pub mod error;
pub mod ext;
pub mod io;
pub mod process;
pub mod reward;
pub mod rng;

pub use distribution::{FiniteDistribution, Symbol};
pub use error::Error;
pub use ext::ExtReal;
