//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the simulation and estimation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside its mathematical domain (angles, counts, norms).
    #[error("domain error: {0}")]
    Domain(String),

    /// Inconsistent or invalid configuration (shapes, counts, missing keys).
    #[error("configuration error: {0}")]
    Config(String),

    /// A matrix that must be positive definite / full rank is numerically not.
    #[error("numerical rank error: {0}")]
    Rank(String),

    /// Categorical sampling was asked to draw from an empty candidate set.
    #[error("no finite-probability candidate to sample from")]
    EmptyCandidates,

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
