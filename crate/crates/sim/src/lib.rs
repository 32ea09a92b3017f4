//! Experiments, CSV traces and the identity-check suite built on
//! [`ioentropy_core`].

pub mod experiment;
pub mod trace;
pub mod verify;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Trace(#[from] trace::TraceError),
    #[error(transparent)]
    Core(#[from] ioentropy_core::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
}
