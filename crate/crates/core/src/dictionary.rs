//! Candidate-direction grids and steering dictionaries.
//!
//! Three grid generators are provided:
//!
//! * **SFG** — spherical Fibonacci grid: golden-angle azimuth increments with
//!   equally spaced boresight cosines, covering a configurable angle range
//!   `ξ` from the boresight pole. Near-uniform on the sphere.
//! * **USPD** — uniform sampling of the physical domain: a rectangular grid
//!   in (zenith, azimuth), both stepped over [0, π).
//! * **USVD** — uniform sampling of the virtual domain: a rectangular grid
//!   uniform in (cos zenith, cos azimuth).
//!
//! A `Dictionary` stacks the steering vectors at the grid directions as
//! columns. Minimal-angle statistics against a reference tessellation CDF
//! quantify how evenly a grid covers the hemisphere.
//!
//! Coordinate convention: the boresight is the Cartesian x-axis, so a
//! direction (zenith θ, azimuth φ) maps to (cos θ, sin θ cos φ, sin θ sin φ).
//! USPD/USVD azimuths span only [0, π); the planar-array steering vector
//! depends on the azimuth through cos φ alone, so the half-plane already
//! covers every distinguishable steering direction.

use rand::Rng;
use std::f64::consts::{PI, TAU};
use std::io::{BufRead, Write};

use crate::array::{steering_vector, validate_angles, ArrayGeometry};
use crate::{CMat, Error, Result};

/// Golden angle ω = (3 − √5)·π ≈ 2.399963 rad.
pub fn golden_angle() -> f64 {
    (3.0 - 5.0_f64.sqrt()) * PI
}

/// Grid construction method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GridMethod {
    Sfg,
    Uspd,
    Usvd,
}

impl std::fmt::Display for GridMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GridMethod::Sfg => write!(f, "sfg"),
            GridMethod::Uspd => write!(f, "uspd"),
            GridMethod::Usvd => write!(f, "usvd"),
        }
    }
}

impl std::str::FromStr for GridMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sfg" => Ok(GridMethod::Sfg),
            "uspd" => Ok(GridMethod::Uspd),
            "usvd" => Ok(GridMethod::Usvd),
            other => Err(Error::Config(format!(
                "unknown grid method '{other}' (expected sfg, uspd, or usvd)"
            ))),
        }
    }
}

/// An ordered set of candidate directions.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionGrid {
    directions: Vec<(f64, f64)>,
    units: Vec<[f64; 3]>,
    method: GridMethod,
    /// SFG angle range ξ; `None` for the rectangular methods.
    angle_range: Option<f64>,
}

impl DirectionGrid {
    fn new(directions: Vec<(f64, f64)>, method: GridMethod, angle_range: Option<f64>) -> Self {
        let units = directions
            .iter()
            .map(|&(z, a)| unit_direction(z, a))
            .collect();
        Self {
            directions,
            units,
            method,
            angle_range,
        }
    }

    /// Directions as (zenith, azimuth) pairs, in construction order.
    pub fn directions(&self) -> &[(f64, f64)] {
        &self.directions
    }

    /// Number of grid points G.
    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn method(&self) -> GridMethod {
        self.method
    }

    pub fn angle_range(&self) -> Option<f64> {
        self.angle_range
    }

    /// Cached unit vectors of the grid directions.
    pub fn unit_vectors(&self) -> &[[f64; 3]] {
        &self.units
    }
}

/// Cartesian unit vector of a direction, boresight along +x.
pub fn unit_direction(zenith: f64, azimuth: f64) -> [f64; 3] {
    let (sz, cz) = zenith.sin_cos();
    let (sa, ca) = azimuth.sin_cos();
    [cz, sz * ca, sz * sa]
}

/// Spherical Fibonacci grid of `g` points covering zenith angles [0, ξ].
///
/// Point `n` (1-based) has boresight cosine `x_n = 1 − 2(n−1)ξ/((G−1)π)` and
/// azimuth `n·ω mod 2π` with ω the golden angle; point 1 is the boresight
/// pole. Needs `g ≥ 2` because the cosine step divides by `G − 1`.
pub fn sfg_grid(g: usize, angle_range: f64) -> Result<DirectionGrid> {
    if g < 2 {
        return Err(Error::Domain(format!(
            "spherical Fibonacci grid needs at least 2 points, got {g}"
        )));
    }
    if !(angle_range > 0.0 && angle_range <= PI) {
        return Err(Error::Domain(format!(
            "angle range must lie in (0, pi], got {angle_range}"
        )));
    }
    let omega = golden_angle();
    let step = 2.0 * angle_range / ((g - 1) as f64 * PI);
    let mut directions = Vec::with_capacity(g);
    // Accumulate the azimuth incrementally; reducing mod 2π one step at a
    // time keeps consecutive differences exact where a direct n·ω evaluation
    // would lose precision for large n.
    let mut azimuth = 0.0;
    for n in 1..=g {
        azimuth += omega;
        if azimuth >= TAU {
            azimuth -= TAU;
        }
        let x = 1.0 - (n - 1) as f64 * step;
        let zenith = x.clamp(-1.0, 1.0).acos();
        directions.push((zenith, azimuth));
    }
    Ok(DirectionGrid::new(
        directions,
        GridMethod::Sfg,
        Some(angle_range),
    ))
}

/// Rectangular grid uniform in the physical angles:
/// zenith (p−1)π/G_v, azimuth (q−1)π/G_h.
pub fn uspd_grid(g_v: usize, g_h: usize) -> Result<DirectionGrid> {
    if g_v < 1 || g_h < 1 {
        return Err(Error::Domain("grid dimensions must be positive".into()));
    }
    let mut directions = Vec::with_capacity(g_v * g_h);
    for p in 1..=g_v {
        let zenith = (p - 1) as f64 * PI / g_v as f64;
        for q in 1..=g_h {
            let azimuth = (q - 1) as f64 * PI / g_h as f64;
            directions.push((zenith, azimuth));
        }
    }
    Ok(DirectionGrid::new(directions, GridMethod::Uspd, None))
}

/// Rectangular grid uniform in the virtual (cosine) domain:
/// cos zenith = 1 − (2p−1)/G_v, cos azimuth = 1 − (2q−1)/G_h.
pub fn usvd_grid(g_v: usize, g_h: usize) -> Result<DirectionGrid> {
    if g_v < 1 || g_h < 1 {
        return Err(Error::Domain("grid dimensions must be positive".into()));
    }
    let mut directions = Vec::with_capacity(g_v * g_h);
    for p in 1..=g_v {
        let zenith = (1.0 - (2 * p - 1) as f64 / g_v as f64).acos();
        for q in 1..=g_h {
            let azimuth = (1.0 - (2 * q - 1) as f64 / g_h as f64).acos();
            directions.push((zenith, azimuth));
        }
    }
    Ok(DirectionGrid::new(directions, GridMethod::Usvd, None))
}

/// Over-complete steering dictionary: one unit-norm column per grid point.
#[derive(Debug, Clone)]
pub struct Dictionary {
    /// `N_a × G` matrix of steering vectors.
    pub atoms: CMat,
    pub grid: DirectionGrid,
    pub geometry: ArrayGeometry,
}

impl Dictionary {
    /// Dictionary size G.
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Columns of `atoms` restricted to a support, as an `N_a × |support|` matrix.
    pub fn sub_matrix(&self, support: &[usize]) -> CMat {
        let n = self.atoms.nrows();
        CMat::from_fn(n, support.len(), |i, j| self.atoms[(i, support[j])])
    }
}

/// Assembles the steering dictionary for a grid.
pub fn build_dictionary(grid: &DirectionGrid, geom: &ArrayGeometry) -> Result<Dictionary> {
    if grid.is_empty() {
        return Err(Error::Domain("cannot build a dictionary from an empty grid".into()));
    }
    let n = geom.n_elements();
    let mut atoms = CMat::zeros(n, grid.len());
    for (j, &(zenith, azimuth)) in grid.directions().iter().enumerate() {
        let col = steering_vector(zenith, azimuth, geom)?;
        atoms.set_column(j, &col);
    }
    Ok(Dictionary {
        atoms,
        grid: grid.clone(),
        geometry: *geom,
    })
}

/// Great-circle angle from `point` to the nearest grid direction.
pub fn min_angle(point: (f64, f64), grid: &DirectionGrid) -> f64 {
    let u = unit_direction(point.0, point.1);
    let mut best = -1.0;
    for v in grid.unit_vectors() {
        let dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
        if dot > best {
            best = dot;
        }
    }
    best.clamp(-1.0, 1.0).acos()
}

/// Minimal angles of a batch of probe points against a grid (unsorted).
pub fn min_angles(points: &[(f64, f64)], grid: &DirectionGrid) -> Vec<f64> {
    points.iter().map(|&p| min_angle(p, grid)).collect()
}

/// Draws directions area-uniformly on the boresight hemisphere.
pub fn sample_hemisphere<R: Rng + ?Sized>(n_samples: usize, rng: &mut R) -> Vec<(f64, f64)> {
    (0..n_samples)
        .map(|_| {
            let cos_z: f64 = rng.random_range(0.0..=1.0);
            let azimuth: f64 = rng.random_range(0.0..TAU);
            (cos_z.acos(), azimuth)
        })
        .collect()
}

/// Empirical CDF of the minimal angle from random hemisphere points to the
/// grid, returned as the sorted sample set.
pub fn empirical_min_angle_cdf<R: Rng + ?Sized>(
    grid: &DirectionGrid,
    n_samples: usize,
    rng: &mut R,
) -> Vec<f64> {
    let points = sample_hemisphere(n_samples, rng);
    let mut angles = min_angles(&points, grid);
    angles.sort_by(|a, b| a.total_cmp(b));
    angles
}

/// Reference minimal-angle distribution for `g` ideally uniform hemisphere
/// points: each point owns a spherical cap of radius `r0` with
/// `cos r0 = (g−1)/g`, and the CDF grows quadratically up to `r0`.
#[derive(Debug, Clone, Copy)]
pub struct TheoreticalCdf {
    /// Tessellation cap radius, radians.
    pub r0: f64,
}

impl TheoreticalCdf {
    pub fn eval(&self, r: f64) -> f64 {
        if r < 0.0 {
            0.0
        } else if r <= self.r0 {
            (r / self.r0).powi(2)
        } else {
            1.0
        }
    }
}

pub fn theoretical_cdf(g: usize) -> Result<TheoreticalCdf> {
    if g < 1 {
        return Err(Error::Domain("tessellation needs at least one point".into()));
    }
    let r0 = ((g as f64 - 1.0) / g as f64).acos();
    Ok(TheoreticalCdf { r0 })
}

/// One-sample Kolmogorov–Smirnov distance between a sorted sample set and a
/// reference CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(sorted_samples: &[f64], cdf: F) -> f64 {
    let n = sorted_samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted_samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i as f64 + 1.0) / n - f).abs());
    }
    d
}

/// Writes a grid as plain text rows `zenith azimuth` (radians, 17
/// significant digits).
pub fn write_grid_text<W: Write>(grid: &DirectionGrid, out: &mut W) -> Result<()> {
    for &(zenith, azimuth) in grid.directions() {
        writeln!(out, "{zenith:.16e} {azimuth:.16e}")?;
    }
    Ok(())
}

/// Reads a grid written by [`write_grid_text`]. The construction method is
/// not stored in the text format, so the caller supplies it.
pub fn read_grid_text<R: BufRead>(input: R, method: GridMethod) -> Result<DirectionGrid> {
    let mut directions = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let parse = |s: Option<&str>| -> Result<f64> {
            s.ok_or_else(|| Error::Config(format!("grid line {} is incomplete", lineno + 1)))?
                .parse()
                .map_err(|e| Error::Config(format!("grid line {}: {e}", lineno + 1)))
        };
        let zenith = parse(fields.next())?;
        let azimuth = parse(fields.next())?;
        validate_angles(zenith, azimuth)?;
        directions.push((zenith, azimuth));
    }
    if directions.is_empty() {
        return Err(Error::Config("grid file contains no directions".into()));
    }
    Ok(DirectionGrid::new(directions, method, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn sfg_first_point_is_the_boresight_pole() {
        let grid = sfg_grid(16, PI / 2.0).unwrap();
        let (zenith, _) = grid.directions()[0];
        assert_relative_eq!(zenith, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn sfg_rejects_tiny_grids_and_bad_ranges() {
        assert!(matches!(sfg_grid(1, PI / 2.0), Err(Error::Domain(_))));
        assert!(sfg_grid(8, 0.0).is_err());
        assert!(sfg_grid(8, PI + 0.01).is_err());
    }

    #[test]
    fn sfg_azimuth_steps_by_the_golden_angle() {
        let omega = golden_angle();
        for g in [64usize, 1024, 4096] {
            let grid = sfg_grid(g, PI / 2.0).unwrap();
            let dirs = grid.directions();
            for w in dirs.windows(2) {
                let mut diff = w[1].1 - w[0].1;
                if diff < 0.0 {
                    diff += TAU;
                }
                assert!(
                    (diff - omega).abs() < 1e-12,
                    "azimuth increment {diff} != {omega} at G={g}"
                );
            }
        }
    }

    #[test]
    fn sfg_matches_literal_step_by_step_oracle() {
        // Re-run the five construction steps from scratch: cosine sequence,
        // ring radius, Cartesian point, spherical transform.
        let g = 5;
        let xi = PI / 2.0;
        let grid = sfg_grid(g, xi).unwrap();
        let omega = (3.0 - 5.0_f64.sqrt()) * PI;
        for n in 1..=g {
            let x = 1.0 - 2.0 * (n as f64 - 1.0) * xi / ((g as f64 - 1.0) * PI);
            let alpha = (1.0 - x * x).max(0.0).sqrt();
            let y = alpha * ((n as f64) * omega).cos();
            let z = alpha * ((n as f64) * omega).sin();
            let zenith = x.acos();
            let mut azimuth = z.atan2(y);
            if azimuth < 0.0 {
                azimuth += TAU;
            }
            let (gz, ga) = grid.directions()[n - 1];
            assert!((gz - zenith).abs() < 1e-12, "zenith mismatch at n={n}");
            if alpha > 1e-12 {
                let mut diff = (ga - azimuth).abs();
                if diff > PI {
                    diff = TAU - diff;
                }
                assert!(diff < 1e-12, "azimuth mismatch at n={n}: {ga} vs {azimuth}");
            }
        }
    }

    #[test]
    fn sfg_cosines_form_an_arithmetic_sequence() {
        let g = 128;
        let xi = 1.1;
        let grid = sfg_grid(g, xi).unwrap();
        let step = 2.0 * xi / ((g as f64 - 1.0) * PI);
        for (idx, &(zenith, _)) in grid.directions().iter().enumerate() {
            let expect = 1.0 - idx as f64 * step;
            assert!((zenith.cos() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn sfg_half_range_stays_on_the_closed_upper_hemisphere() {
        let grid = sfg_grid(512, PI / 2.0).unwrap();
        for &(zenith, _) in grid.directions() {
            assert!(zenith.cos() >= -1e-12);
        }
    }

    #[test]
    fn uspd_first_point_and_two_by_two() {
        let grid = uspd_grid(2, 2).unwrap();
        let dirs = grid.directions();
        assert_eq!(dirs.len(), 4);
        assert_eq!(dirs[0], (0.0, 0.0));
        let expect = [(0.0, 0.0), (0.0, PI / 2.0), (PI / 2.0, 0.0), (PI / 2.0, PI / 2.0)];
        for (got, want) in dirs.iter().zip(expect.iter()) {
            assert_relative_eq!(got.0, want.0, epsilon = 1e-15);
            assert_relative_eq!(got.1, want.1, epsilon = 1e-15);
        }
    }

    #[test]
    fn uspd_32_matches_direct_formula() {
        let grid = uspd_grid(32, 32).unwrap();
        assert_eq!(grid.len(), 1024);
        let max_zenith = grid
            .directions()
            .iter()
            .map(|d| d.0)
            .fold(0.0, f64::max);
        assert_relative_eq!(max_zenith, 31.0 * PI / 32.0, epsilon = 1e-12);
        for p in 1..=32usize {
            for q in 1..=32usize {
                let (z, a) = grid.directions()[(p - 1) * 32 + (q - 1)];
                assert_relative_eq!(z, (p as f64 - 1.0) * PI / 32.0, epsilon = 1e-13);
                assert_relative_eq!(a, (q as f64 - 1.0) * PI / 32.0, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn usvd_small_grids_hit_the_analytic_angles() {
        let g1 = usvd_grid(1, 1).unwrap();
        assert_relative_eq!(g1.directions()[0].0, PI / 2.0, epsilon = 1e-15);

        let g2 = usvd_grid(2, 1).unwrap();
        assert_relative_eq!(g2.directions()[0].0, PI / 3.0, epsilon = 1e-12);
        assert_relative_eq!(g2.directions()[1].0, 2.0 * PI / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn usvd_32_matches_direct_formula() {
        let grid = usvd_grid(32, 32).unwrap();
        for p in 1..=32usize {
            for q in 1..=32usize {
                let (z, a) = grid.directions()[(p - 1) * 32 + (q - 1)];
                let cz = 1.0 - (2.0 * p as f64 - 1.0) / 32.0;
                let ca = 1.0 - (2.0 * q as f64 - 1.0) / 32.0;
                assert_relative_eq!(z.cos(), cz, epsilon = 1e-12);
                assert_relative_eq!(a.cos(), ca, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn single_point_dictionary_at_broadside_is_flat() {
        let grid = DirectionGrid::new(vec![(PI / 2.0, PI / 2.0)], GridMethod::Uspd, None);
        let geom = ArrayGeometry::half_wavelength(3, 3).unwrap();
        let dict = build_dictionary(&grid, &geom).unwrap();
        for i in 0..9 {
            assert_relative_eq!(dict.atoms[(i, 0)].re, 1.0 / 3.0, epsilon = 1e-14);
            assert_relative_eq!(dict.atoms[(i, 0)].im, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn dictionary_columns_are_unit_norm_and_match_steering() {
        let grid = uspd_grid(2, 2).unwrap();
        let geom = ArrayGeometry::half_wavelength(2, 2).unwrap();
        let dict = build_dictionary(&grid, &geom).unwrap();
        for (j, &(z, a)) in grid.directions().iter().enumerate() {
            let col = dict.atoms.column(j);
            assert_relative_eq!(col.norm(), 1.0, epsilon = 1e-12);
            let want = steering_vector(z, a, &geom).unwrap();
            assert!((col - &want).norm() < 1e-13);
        }
    }

    #[test]
    fn distinct_sfg_points_give_distinct_columns() {
        let grid = sfg_grid(64, PI / 2.0).unwrap();
        let geom = ArrayGeometry::half_wavelength(4, 4).unwrap();
        let dict = build_dictionary(&grid, &geom).unwrap();
        for i in 0..dict.len() {
            for j in (i + 1)..dict.len() {
                let d = (dict.atoms.column(i) - dict.atoms.column(j)).norm();
                assert!(d > 1e-8, "columns {i} and {j} coincide");
            }
        }
    }

    #[test]
    fn min_angle_of_a_grid_point_is_zero() {
        let grid = sfg_grid(32, PI / 2.0).unwrap();
        let p = grid.directions()[7];
        assert!(min_angle(p, &grid) < 1e-12);
    }

    #[test]
    fn min_angle_of_the_antipode_is_pi() {
        let grid = DirectionGrid::new(vec![(0.0, 0.0)], GridMethod::Uspd, None);
        assert_relative_eq!(min_angle((PI, 0.0), &grid), PI, epsilon = 1e-12);
    }

    #[test]
    fn min_angle_matches_exhaustive_scan() {
        let grid = sfg_grid(1024, PI / 2.0).unwrap();
        let mut rng = rng_from_seed(17);
        for _ in 0..32 {
            let p = sample_hemisphere(1, &mut rng)[0];
            let got = min_angle(p, &grid);
            let u = unit_direction(p.0, p.1);
            let want = grid
                .directions()
                .iter()
                .map(|&(z, a)| {
                    let v = unit_direction(z, a);
                    (u[0] * v[0] + u[1] * v[1] + u[2] * v[2])
                        .clamp(-1.0, 1.0)
                        .acos()
                })
                .fold(f64::INFINITY, f64::min);
            assert_relative_eq!(got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn cdf_of_grid_points_against_their_own_grid_is_all_zero() {
        // acos near a unit dot product amplifies 1-ulp errors to ~1e-8.
        let grid = sfg_grid(64, PI / 2.0).unwrap();
        let angles = min_angles(grid.directions(), &grid);
        assert!(angles.iter().all(|&a| a < 1e-7));
    }

    #[test]
    fn empirical_cdf_is_deterministic_under_a_seed() {
        let grid = sfg_grid(128, PI / 2.0).unwrap();
        let a = empirical_min_angle_cdf(&grid, 500, &mut rng_from_seed(3));
        let b = empirical_min_angle_cdf(&grid, 500, &mut rng_from_seed(3));
        assert_eq!(a, b);
    }

    #[test]
    fn sfg_tracks_the_reference_cdf_more_closely_than_rectangular_grids() {
        let g = 1024;
        let sfg = sfg_grid(g, PI / 2.0).unwrap();
        let uspd = uspd_grid(32, 32).unwrap();
        let usvd = usvd_grid(32, 32).unwrap();
        let reference = theoretical_cdf(g).unwrap();

        let points = sample_hemisphere(2000, &mut rng_from_seed(99));
        let ks = |grid: &DirectionGrid| {
            let mut a = min_angles(&points, grid);
            a.sort_by(|x, y| x.total_cmp(y));
            ks_distance(&a, |r| reference.eval(r))
        };
        let (k_sfg, k_uspd, k_usvd) = (ks(&sfg), ks(&uspd), ks(&usvd));
        assert!(k_sfg < k_uspd, "KS sfg={k_sfg} vs uspd={k_uspd}");
        assert!(k_sfg < k_usvd, "KS sfg={k_sfg} vs usvd={k_usvd}");
    }

    #[test]
    fn sfg_upper_quantile_beats_uspd() {
        let points = sample_hemisphere(4000, &mut rng_from_seed(7));
        let quantile = |grid: &DirectionGrid| {
            let mut a = min_angles(&points, grid);
            a.sort_by(|x, y| x.total_cmp(y));
            a[(0.95 * a.len() as f64) as usize]
        };
        let q_sfg = quantile(&sfg_grid(1024, PI / 2.0).unwrap());
        let q_uspd = quantile(&uspd_grid(32, 32).unwrap());
        assert!(q_sfg < q_uspd, "95th percentile {q_sfg} !< {q_uspd}");
    }

    #[test]
    fn theoretical_cdf_endpoints_and_small_cases() {
        let c = theoretical_cdf(1024).unwrap();
        assert_eq!(c.eval(0.0), 0.0);
        assert_relative_eq!(c.eval(c.r0), 1.0, epsilon = 1e-15);
        assert_eq!(c.eval(-0.5), 0.0);
        assert_eq!(c.eval(c.r0 + 0.1), 1.0);
        assert_relative_eq!(c.r0, (1023.0_f64 / 1024.0).acos(), epsilon = 1e-15);

        let c1 = theoretical_cdf(1).unwrap();
        assert_relative_eq!(c1.r0, PI / 2.0, epsilon = 1e-15);
        assert!(theoretical_cdf(0).is_err());
    }

    #[test]
    fn grid_text_round_trips() {
        let grid = sfg_grid(32, PI / 2.0).unwrap();
        let mut buf = Vec::new();
        write_grid_text(&grid, &mut buf).unwrap();
        let parsed = read_grid_text(std::io::Cursor::new(buf), GridMethod::Sfg).unwrap();
        assert_eq!(parsed.len(), grid.len());
        for (a, b) in parsed.directions().iter().zip(grid.directions()) {
            assert_relative_eq!(a.0, b.0, epsilon = 1e-15);
            assert_relative_eq!(a.1, b.1, epsilon = 1e-15);
        }
    }

    proptest! {
        #[test]
        fn theoretical_cdf_is_monotone_and_quadratic(g in 1usize..5000, r1 in 0.0..2.0f64, r2 in 0.0..2.0f64) {
            let c = theoretical_cdf(g).unwrap();
            let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
            prop_assert!(c.eval(lo) <= c.eval(hi));
            if hi <= c.r0 {
                prop_assert!((c.eval(hi) - (hi / c.r0).powi(2)).abs() < 1e-12);
            }
        }
    }
}
