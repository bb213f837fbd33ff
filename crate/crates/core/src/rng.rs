//! Deterministic random-stream plumbing.
//!
//! Every stochastic component takes an explicit generator; nothing touches a
//! global RNG. Monte-Carlo workers derive independent streams from a master
//! seed plus structural indices (trial number, stream role) so that results
//! do not depend on scheduling order.

use num_complex::Complex;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::C64;

/// Stream roles used when deriving per-trial sub-seeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamKind {
    Channel,
    Combiner,
    Noise,
    Estimator,
    Sampling,
}

impl StreamKind {
    fn tag(self) -> u64 {
        match self {
            StreamKind::Channel => 0x1,
            StreamKind::Combiner => 0x2,
            StreamKind::Noise => 0x3,
            StreamKind::Estimator => 0x4,
            StreamKind::Sampling => 0x5,
        }
    }
}

/// SplitMix64 finalizer; decorrelates structured seed inputs.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Derives a sub-seed from a master seed and structural indices.
pub fn derive_seed(master: u64, trial: u64, kind: StreamKind) -> u64 {
    splitmix64(splitmix64(master ^ splitmix64(trial)) ^ kind.tag())
}

/// Builds the crate's standard generator from a seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draws a circularly symmetric complex Gaussian CN(0, variance).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> C64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(s * re, s * im)
}

/// Draws a unit-modulus complex number with phase uniform on [0, 2π).
pub fn random_phase<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let psi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    Complex::from_polar(1.0, psi)
}
