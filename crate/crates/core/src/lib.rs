//! Compressive channel estimation for hybrid full-dimensional MIMO.
//!
//! The crate simulates a uniform planar array receiving uplink pilots through
//! random phase-shifter combiners, whitens the combined noise, and recovers
//! the frequency-domain channel from a sparse beamspace representation. It
//! ships three candidate-direction grids (spherical Fibonacci, uniform
//! physical-domain, uniform virtual-domain), three sparse estimators (OMP,
//! SWOMP, and a Bayesian inference-aided randomized greedy ensemble), and a
//! Monte-Carlo benchmark harness that writes CSV summaries.
//!
//! Pipeline at a glance:
//!
//! ```text
//! channel  ──▶ measurement ──▶ estimators ──▶ bench (NMSE sweeps, CSV)
//!   ▲               ▲              ▲
//! array          combiners     dictionary (SFG / USPD / USVD grids)
//! ```
//!
//! All randomness flows through caller-supplied seeded generators; identical
//! configurations produce bit-identical outputs.

pub mod array;
pub mod bench;
pub mod channel;
pub mod config;
pub mod dictionary;
pub mod error;
pub mod estimators;
pub mod measurement;
pub mod rng;

pub use error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex<f64>;
/// Dynamically sized complex matrix.
pub type CMat = nalgebra::DMatrix<C64>;
/// Dynamically sized complex column vector.
pub type CVec = nalgebra::DVector<C64>;
