//! Uniform planar array geometry and steering vectors.
//!
//! The array has `n_rows` × `n_cols` elements with spacings given in carrier
//! wavelengths. Angles follow the boresight convention: the zenith angle is
//! measured from the axis perpendicular to nothing in particular but along
//! which the vertical phase progression runs, so the steering vector is the
//! normalized Kronecker product of a vertical factor driven by `cos(zenith)`
//! and a horizontal factor driven by `sin(zenith)·cos(azimuth)`.

use num_complex::Complex;
use std::f64::consts::{PI, TAU};

use crate::{CVec, Error, Result};

/// Uniform planar array: element counts and spacings in wavelengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    /// Number of element rows (vertical dimension).
    pub n_rows: usize,
    /// Number of element columns (horizontal dimension).
    pub n_cols: usize,
    /// Vertical element spacing in carrier wavelengths.
    pub spacing_v: f64,
    /// Horizontal element spacing in carrier wavelengths.
    pub spacing_h: f64,
}

impl ArrayGeometry {
    pub fn new(n_rows: usize, n_cols: usize, spacing_v: f64, spacing_h: f64) -> Result<Self> {
        if n_rows < 1 || n_cols < 1 {
            return Err(Error::Domain(format!(
                "array needs at least one row and one column, got {n_rows}x{n_cols}"
            )));
        }
        if spacing_v <= 0.0 || spacing_h <= 0.0 || !spacing_v.is_finite() || !spacing_h.is_finite()
        {
            return Err(Error::Domain(format!(
                "element spacings must be positive, got ({spacing_v}, {spacing_h})"
            )));
        }
        Ok(Self {
            n_rows,
            n_cols,
            spacing_v,
            spacing_h,
        })
    }

    /// Half-wavelength-spaced square array, the usual benchmark layout.
    pub fn half_wavelength(n_rows: usize, n_cols: usize) -> Result<Self> {
        Self::new(n_rows, n_cols, 0.5, 0.5)
    }

    /// Total element count.
    pub fn n_elements(&self) -> usize {
        self.n_rows * self.n_cols
    }
}

/// Validates a (zenith, azimuth) pair.
///
/// Zenith must lie in [0, π]. Azimuth enters the phase terms only through
/// `cos(azimuth)`, so both the [−π, π) and [0, 2π) conventions are accepted.
pub fn validate_angles(zenith: f64, azimuth: f64) -> Result<()> {
    if !zenith.is_finite() || !(0.0..=PI).contains(&zenith) {
        return Err(Error::Domain(format!(
            "zenith must lie in [0, pi], got {zenith}"
        )));
    }
    if !azimuth.is_finite() || !(-PI..TAU).contains(&azimuth) {
        return Err(Error::Domain(format!(
            "azimuth must lie in [-pi, 2*pi), got {azimuth}"
        )));
    }
    Ok(())
}

/// Normalized steering vector of the planar array toward (zenith, azimuth).
///
/// Entry `m * n_cols + n` equals
/// `exp(-j2π·m·spacing_v·cos(zenith)) · exp(-j2π·n·spacing_h·sin(zenith)·cos(azimuth))`
/// divided by `sqrt(n_rows · n_cols)`, i.e. the Kronecker product of the
/// vertical and horizontal phase progressions. The result always has unit
/// Euclidean norm.
pub fn steering_vector(zenith: f64, azimuth: f64, geom: &ArrayGeometry) -> Result<CVec> {
    validate_angles(zenith, azimuth)?;

    let psi_v = -TAU * geom.spacing_v * zenith.cos();
    let psi_h = -TAU * geom.spacing_h * zenith.sin() * azimuth.cos();
    let scale = 1.0 / (geom.n_elements() as f64).sqrt();

    let mut out = CVec::zeros(geom.n_elements());
    for m in 0..geom.n_rows {
        let row_phase = psi_v * m as f64;
        for n in 0..geom.n_cols {
            let phase = row_phase + psi_h * n as f64;
            out[m * geom.n_cols + n] = Complex::from_polar(scale, phase);
        }
    }
    Ok(out)
}
