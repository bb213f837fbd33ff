//! Geometry-based stochastic multipath channel.
//!
//! A realization is a sum of discrete scattering paths, each with a complex
//! gain, a continuous delay, and an arrival direction. Delay taps are formed
//! by sampling a raised-cosine pulse at the symbol period, and per-subcarrier
//! frequency responses follow from a DFT across taps. The frequency-domain
//! steering matrix is common to all subcarriers, which is what makes the
//! beamspace representation row-sparse with a shared support.

use num_complex::Complex;
use rand::Rng;
use std::f64::consts::PI;

use crate::array::{steering_vector, validate_angles, ArrayGeometry};
use crate::rng::complex_gaussian;
use crate::{C64, CMat, CVec, Error, Result};

/// One scattering path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Path {
    /// Complex gain.
    pub gain: C64,
    /// Propagation delay in seconds.
    pub delay: f64,
    /// Zenith angle of arrival, radians in [0, π].
    pub zenith: f64,
    /// Azimuth angle of arrival, radians in [−π, π).
    pub azimuth: f64,
}

impl Path {
    pub fn new(gain: C64, delay: f64, zenith: f64, azimuth: f64) -> Result<Self> {
        validate_angles(zenith, azimuth)?;
        if !delay.is_finite() || delay < 0.0 {
            return Err(Error::Domain(format!(
                "path delay must be nonnegative, got {delay}"
            )));
        }
        Ok(Self {
            gain,
            delay,
            zenith,
            azimuth,
        })
    }
}

/// Raised-cosine impulse response sampled at time `t`, with unit peak.
///
/// `f(0) = 1` and `f(m·period) = 0` for nonzero integers `m`; the removable
/// singularities at `t = ±period/(2·rolloff)` are replaced by their analytic
/// limits. Total over all finite inputs with `rolloff ∈ [0, 1]`, `period > 0`.
pub fn raised_cosine(t: f64, rolloff: f64, period: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&rolloff));
    debug_assert!(period > 0.0);
    let x = t / period;
    if rolloff > 0.0 {
        let singular = 1.0 / (2.0 * rolloff);
        if (x.abs() - singular).abs() < 1e-9 {
            return PI / 4.0 * sinc(singular);
        }
    }
    sinc(x) * (PI * rolloff * x).cos() / (1.0 - (2.0 * rolloff * x).powi(2))
}

/// Normalized sinc: sin(πx)/(πx), with sinc(0) = 1.
fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// Channel vector at delay tap `tap` (1-based): the gain-and-pulse weighted
/// sum of steering vectors over all paths.
pub fn channel_tap(
    tap: usize,
    paths: &[Path],
    geom: &ArrayGeometry,
    period: f64,
    rolloff: f64,
) -> Result<CVec> {
    if paths.is_empty() {
        return Err(Error::Domain("channel tap of an empty path set".into()));
    }
    if tap < 1 {
        return Err(Error::Domain("tap indices are 1-based".into()));
    }
    let t = tap as f64 * period;
    let mut acc = CVec::zeros(geom.n_elements());
    for p in paths {
        let weight = p.gain * raised_cosine(t - p.delay, rolloff, period);
        acc += steering_vector(p.zenith, p.azimuth, geom)? * weight;
    }
    Ok(acc)
}

/// DFT across delay taps: `freq[k] = Σ_l taps[l] · exp(−j2π(l−1)k/K)` for
/// subcarriers `k = 1..K` (1-based exponent convention).
pub fn to_frequency(taps: &[CVec], subcarriers: usize) -> Result<Vec<CVec>> {
    if taps.is_empty() {
        return Err(Error::Domain("DFT of an empty tap list".into()));
    }
    if subcarriers < taps.len() {
        return Err(Error::Config(format!(
            "subcarrier count {} must be at least the tap count {}",
            subcarriers,
            taps.len()
        )));
    }
    let n = taps[0].len();
    let mut freq = Vec::with_capacity(subcarriers);
    for k in 1..=subcarriers {
        let mut acc = CVec::zeros(n);
        for (l_idx, tap) in taps.iter().enumerate() {
            let phase = -2.0 * PI * (l_idx as f64) * (k as f64) / (subcarriers as f64);
            acc += tap * Complex::from_polar(1.0, phase);
        }
        freq.push(acc);
    }
    Ok(freq)
}

/// Stochastic channel parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelConfig {
    /// Inclusive range for the number of scattering paths.
    pub n_paths_min: usize,
    pub n_paths_max: usize,
    /// Sampling period `T_s` in seconds.
    pub sampling_period: f64,
    /// Raised-cosine shape parameter in [0, 1].
    pub rolloff: f64,
    /// Zenith sampling range [lo, hi] ⊆ [0, π]; directions are drawn
    /// area-uniformly on the corresponding spherical band.
    pub zenith_range: (f64, f64),
    /// Optional fixed delay-tap count; `None` selects the default rule.
    pub tap_count: Option<usize>,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            n_paths_min: 6,
            n_paths_max: 12,
            sampling_period: 1.0 / 1760.0 * 1e-6,
            rolloff: 1.0,
            zenith_range: (0.0, PI / 2.0),
            tap_count: None,
        }
    }
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_paths_min < 1 || self.n_paths_max < self.n_paths_min {
            return Err(Error::Config(format!(
                "path-count range [{}, {}] is invalid",
                self.n_paths_min, self.n_paths_max
            )));
        }
        if !(self.sampling_period > 0.0) {
            return Err(Error::Config("sampling period must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.rolloff) {
            return Err(Error::Config("rolloff must lie in [0, 1]".into()));
        }
        let (lo, hi) = self.zenith_range;
        if !(0.0..=PI).contains(&lo) || !(0.0..=PI).contains(&hi) || lo >= hi {
            return Err(Error::Config("zenith range must satisfy 0 <= lo < hi <= pi".into()));
        }
        if self.tap_count == Some(0) {
            return Err(Error::Config("tap count must be positive".into()));
        }
        Ok(())
    }

    /// Delay-tap count: the configured value, or `min(K, ceil(max delay / T_s) + 4)`
    /// so the pulse tail past the last path is captured.
    pub fn tap_count_for(&self, paths: &[Path], subcarriers: usize) -> usize {
        if let Some(l) = self.tap_count {
            return l.min(subcarriers).max(1);
        }
        let max_delay = paths.iter().map(|p| p.delay).fold(0.0, f64::max);
        let span = (max_delay / self.sampling_period).ceil() as usize + 4;
        span.clamp(1, subcarriers)
    }
}

/// A sampled channel: taps, per-subcarrier responses, and the paths that
/// generated them.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    /// Delay-domain channel vectors, one per tap `l = 1..L_d`.
    pub taps: Vec<CVec>,
    /// Frequency-domain channel vectors, one per subcarrier `k = 1..K`.
    pub freq: Vec<CVec>,
    pub paths: Vec<Path>,
    pub sampling_period: f64,
    pub rolloff: f64,
}

impl ChannelRealization {
    /// Builds taps and subcarrier responses from a path set.
    pub fn synthesize(
        paths: Vec<Path>,
        geom: &ArrayGeometry,
        cfg: &ChannelConfig,
        subcarriers: usize,
    ) -> Result<Self> {
        let n_taps = cfg.tap_count_for(&paths, subcarriers);
        let taps: Vec<CVec> = (1..=n_taps)
            .map(|l| channel_tap(l, &paths, geom, cfg.sampling_period, cfg.rolloff))
            .collect::<Result<_>>()?;
        let freq = to_frequency(&taps, subcarriers)?;
        Ok(Self {
            taps,
            freq,
            paths,
            sampling_period: cfg.sampling_period,
            rolloff: cfg.rolloff,
        })
    }

    /// Frequency responses stacked as an `N_a × K` matrix.
    pub fn freq_matrix(&self) -> CMat {
        let n = self.freq[0].len();
        let k = self.freq.len();
        CMat::from_fn(n, k, |i, j| self.freq[j][i])
    }

    /// Mean per-subcarrier squared norm, `(1/K) Σ_k ‖h[k]‖²`.
    pub fn mean_subcarrier_energy(&self) -> f64 {
        self.freq.iter().map(|h| h.norm_squared()).sum::<f64>() / self.freq.len() as f64
    }
}

/// Samples a path set: path count uniform on the configured range, directions
/// area-uniform on the zenith band, delays uniform on [0, (N_p−1)·T_s], and
/// complex-Gaussian gains rescaled so the realized mean subcarrier energy
/// equals exactly the element count `N_a`.
pub fn sample_paths<R: Rng + ?Sized>(
    cfg: &ChannelConfig,
    geom: &ArrayGeometry,
    subcarriers: usize,
    rng: &mut R,
) -> Result<Vec<Path>> {
    cfg.validate()?;
    let n_paths = rng.random_range(cfg.n_paths_min..=cfg.n_paths_max);
    let (z_lo, z_hi) = cfg.zenith_range;
    // Area-uniform zenith: cos(zenith) uniform between the band's cosines.
    let (c_hi, c_lo) = (z_lo.cos(), z_hi.cos());
    let delay_span = (n_paths as f64 - 1.0) * cfg.sampling_period;

    let mut paths = Vec::with_capacity(n_paths);
    for _ in 0..n_paths {
        let cos_z: f64 = rng.random_range(c_lo..=c_hi);
        let zenith = cos_z.clamp(-1.0, 1.0).acos();
        let azimuth: f64 = rng.random_range(-PI..PI);
        let gain = complex_gaussian(rng, 1.0);
        let delay: f64 = if delay_span > 0.0 {
            rng.random_range(0.0..delay_span)
        } else {
            0.0
        };
        paths.push(Path::new(gain, delay, zenith, azimuth)?);
    }

    normalize_gains(&mut paths, geom, cfg, subcarriers)?;
    Ok(paths)
}

/// Rescales path gains in place so the synthesized realization satisfies
/// `(1/K) Σ_k ‖h[k]‖² = N_a`.
pub fn normalize_gains(
    paths: &mut [Path],
    geom: &ArrayGeometry,
    cfg: &ChannelConfig,
    subcarriers: usize,
) -> Result<()> {
    let trial = ChannelRealization::synthesize(paths.to_vec(), geom, cfg, subcarriers)?;
    let energy = trial.mean_subcarrier_energy();
    if energy <= 0.0 {
        return Err(Error::Domain(
            "cannot normalize a channel with zero energy".into(),
        ));
    }
    let scale = (geom.n_elements() as f64 / energy).sqrt();
    for p in paths.iter_mut() {
        p.gain *= scale;
    }
    Ok(())
}
