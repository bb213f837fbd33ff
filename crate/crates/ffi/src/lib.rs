//! C ABI over the direction-grid and steering primitives.
//!
//! Handles are opaque pointers owned by this library: every `*_new`-style
//! constructor writes a pointer through an out-parameter and every handle
//! must be released with its matching `*_free`. All functions return an
//! [`FdceStatus`] code; out-parameters are written only on `OK`.
//!
//! The generated header lives at `include/fdmimo_ce.h`.

use std::ffi::{c_char, CStr};

use fdmimo_ce::array::ArrayGeometry;
use fdmimo_ce::dictionary::{
    build_dictionary, min_angle, sfg_grid, theoretical_cdf, uspd_grid, usvd_grid, Dictionary,
    DirectionGrid,
};
use fdmimo_ce::Error;

/// Opaque handle to a candidate-direction grid.
pub struct FdceGrid(DirectionGrid);

/// Opaque handle to a steering dictionary.
pub struct FdceDictionary(Dictionary);

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdceStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// An argument was outside its mathematical domain.
    DomainError = 2,
    /// Arguments were structurally inconsistent (sizes, counts).
    InvalidArgument = 3,
    /// An index was out of range for the addressed object.
    IndexOutOfRange = 4,
    /// A caller-provided buffer is too small.
    BufferTooSmall = 5,
    /// A matrix that must be full rank is numerically rank deficient.
    RankError = 6,
    /// Any other internal failure.
    InternalError = 7,
}

fn status_of(e: &Error) -> FdceStatus {
    match e {
        Error::Domain(_) => FdceStatus::DomainError,
        Error::Config(_) => FdceStatus::InvalidArgument,
        Error::Rank(_) => FdceStatus::RankError,
        _ => FdceStatus::InternalError,
    }
}

/// Library version as a static, NUL-terminated string.
#[no_mangle]
pub extern "C" fn fdce_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn fdce_status_message(status: FdceStatus) -> *const c_char {
    let s: &'static CStr = match status {
        FdceStatus::Ok => c"ok",
        FdceStatus::NullArgument => c"null pointer argument",
        FdceStatus::DomainError => c"argument outside its domain",
        FdceStatus::InvalidArgument => c"inconsistent arguments",
        FdceStatus::IndexOutOfRange => c"index out of range",
        FdceStatus::BufferTooSmall => c"buffer too small",
        FdceStatus::RankError => c"numerically rank deficient",
        FdceStatus::InternalError => c"internal error",
    };
    s.as_ptr()
}

unsafe fn write_handle<T>(out: *mut *mut T, value: T) -> FdceStatus {
    if out.is_null() {
        return FdceStatus::NullArgument;
    }
    *out = Box::into_raw(Box::new(value));
    FdceStatus::Ok
}

/// Builds a spherical Fibonacci grid of `g` points over zenith range
/// `angle_range` (radians in (0, pi]).
///
/// # Safety
/// `out` must be a valid pointer to receive the handle.
#[no_mangle]
pub unsafe extern "C" fn fdce_grid_sfg(
    g: usize,
    angle_range: f64,
    out: *mut *mut FdceGrid,
) -> FdceStatus {
    match sfg_grid(g, angle_range) {
        Ok(grid) => write_handle(out, FdceGrid(grid)),
        Err(e) => status_of(&e),
    }
}

/// Builds a grid uniform in the physical angles, `g_v × g_h` points.
///
/// # Safety
/// `out` must be a valid pointer to receive the handle.
#[no_mangle]
pub unsafe extern "C" fn fdce_grid_uspd(
    g_v: usize,
    g_h: usize,
    out: *mut *mut FdceGrid,
) -> FdceStatus {
    match uspd_grid(g_v, g_h) {
        Ok(grid) => write_handle(out, FdceGrid(grid)),
        Err(e) => status_of(&e),
    }
}

/// Builds a grid uniform in the cosine (virtual) domain, `g_v × g_h` points.
///
/// # Safety
/// `out` must be a valid pointer to receive the handle.
#[no_mangle]
pub unsafe extern "C" fn fdce_grid_usvd(
    g_v: usize,
    g_h: usize,
    out: *mut *mut FdceGrid,
) -> FdceStatus {
    match usvd_grid(g_v, g_h) {
        Ok(grid) => write_handle(out, FdceGrid(grid)),
        Err(e) => status_of(&e),
    }
}

/// Number of directions in a grid; 0 for a null handle.
///
/// # Safety
/// `grid` must be a live handle from a `fdce_grid_*` constructor or null.
#[no_mangle]
pub unsafe extern "C" fn fdce_grid_len(grid: *const FdceGrid) -> usize {
    if grid.is_null() {
        0
    } else {
        (*grid).0.len()
    }
}

/// Reads direction `index` as (zenith, azimuth) in radians.
///
/// # Safety
/// `grid` must be a live handle; `zenith`/`azimuth` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fdce_grid_direction(
    grid: *const FdceGrid,
    index: usize,
    zenith: *mut f64,
    azimuth: *mut f64,
) -> FdceStatus {
    if grid.is_null() || zenith.is_null() || azimuth.is_null() {
        return FdceStatus::NullArgument;
    }
    let grid = &(*grid).0;
    match grid.directions().get(index) {
        Some(&(z, a)) => {
            *zenith = z;
            *azimuth = a;
            FdceStatus::Ok
        }
        None => FdceStatus::IndexOutOfRange,
    }
}

/// Great-circle angle from (zenith, azimuth) to the nearest grid direction.
///
/// # Safety
/// `grid` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fdce_grid_min_angle(
    grid: *const FdceGrid,
    zenith: f64,
    azimuth: f64,
    out: *mut f64,
) -> FdceStatus {
    if grid.is_null() || out.is_null() {
        return FdceStatus::NullArgument;
    }
    if !zenith.is_finite() || !azimuth.is_finite() {
        return FdceStatus::DomainError;
    }
    *out = min_angle((zenith, azimuth), &(*grid).0);
    FdceStatus::Ok
}

/// Releases a grid handle. Null is ignored.
///
/// # Safety
/// `grid` must be a handle from a `fdce_grid_*` constructor, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fdce_grid_free(grid: *mut FdceGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Builds the steering dictionary of a grid for an `n_rows × n_cols` planar
/// array with the given element spacings (in carrier wavelengths).
///
/// # Safety
/// `grid` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fdce_dictionary_new(
    grid: *const FdceGrid,
    n_rows: usize,
    n_cols: usize,
    spacing_v: f64,
    spacing_h: f64,
    out: *mut *mut FdceDictionary,
) -> FdceStatus {
    if grid.is_null() {
        return FdceStatus::NullArgument;
    }
    let geom = match ArrayGeometry::new(n_rows, n_cols, spacing_v, spacing_h) {
        Ok(g) => g,
        Err(e) => return status_of(&e),
    };
    match build_dictionary(&(*grid).0, &geom) {
        Ok(dict) => write_handle(out, FdceDictionary(dict)),
        Err(e) => status_of(&e),
    }
}

/// Number of atoms (grid size G); 0 for a null handle.
///
/// # Safety
/// `dict` must be a live dictionary handle or null.
#[no_mangle]
pub unsafe extern "C" fn fdce_dictionary_len(dict: *const FdceDictionary) -> usize {
    if dict.is_null() {
        0
    } else {
        (*dict).0.len()
    }
}

/// Array elements per atom (N_a); 0 for a null handle.
///
/// # Safety
/// `dict` must be a live dictionary handle or null.
#[no_mangle]
pub unsafe extern "C" fn fdce_dictionary_n_elements(dict: *const FdceDictionary) -> usize {
    if dict.is_null() {
        0
    } else {
        (*dict).0.atoms.nrows()
    }
}

/// Copies atom `index` into `out` as interleaved (re, im) doubles.
/// `capacity` counts doubles and must be at least `2·N_a`.
///
/// # Safety
/// `dict` must be a live handle; `out` must point to `capacity` writable
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn fdce_dictionary_atom(
    dict: *const FdceDictionary,
    index: usize,
    out: *mut f64,
    capacity: usize,
) -> FdceStatus {
    if dict.is_null() || out.is_null() {
        return FdceStatus::NullArgument;
    }
    let dict = &(*dict).0;
    if index >= dict.len() {
        return FdceStatus::IndexOutOfRange;
    }
    let n = dict.atoms.nrows();
    if capacity < 2 * n {
        return FdceStatus::BufferTooSmall;
    }
    for (i, v) in dict.atoms.column(index).iter().enumerate() {
        *out.add(2 * i) = v.re;
        *out.add(2 * i + 1) = v.im;
    }
    FdceStatus::Ok
}

/// Releases a dictionary handle. Null is ignored.
///
/// # Safety
/// `dict` must be a handle from `fdce_dictionary_new`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fdce_dictionary_free(dict: *mut FdceDictionary) {
    if !dict.is_null() {
        drop(Box::from_raw(dict));
    }
}

/// Evaluates the planar-array steering vector toward (zenith, azimuth) into
/// `out` as interleaved (re, im) doubles; needs `capacity ≥ 2·n_rows·n_cols`.
///
/// # Safety
/// `out` must point to `capacity` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn fdce_steering_vector(
    zenith: f64,
    azimuth: f64,
    n_rows: usize,
    n_cols: usize,
    spacing_v: f64,
    spacing_h: f64,
    out: *mut f64,
    capacity: usize,
) -> FdceStatus {
    if out.is_null() {
        return FdceStatus::NullArgument;
    }
    let geom = match ArrayGeometry::new(n_rows, n_cols, spacing_v, spacing_h) {
        Ok(g) => g,
        Err(e) => return status_of(&e),
    };
    if capacity < 2 * geom.n_elements() {
        return FdceStatus::BufferTooSmall;
    }
    match fdmimo_ce::array::steering_vector(zenith, azimuth, &geom) {
        Ok(v) => {
            for (i, entry) in v.iter().enumerate() {
                *out.add(2 * i) = entry.re;
                *out.add(2 * i + 1) = entry.im;
            }
            FdceStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Tessellation cap radius `r0` for `g` ideally uniform hemisphere points.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fdce_theoretical_min_angle_radius(
    g: usize,
    out: *mut f64,
) -> FdceStatus {
    if out.is_null() {
        return FdceStatus::NullArgument;
    }
    match theoretical_cdf(g) {
        Ok(c) => {
            *out = c.r0;
            FdceStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Reference minimal-angle CDF value at radius `r` for `g` grid points.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fdce_theoretical_min_angle_cdf(
    g: usize,
    r: f64,
    out: *mut f64,
) -> FdceStatus {
    if out.is_null() {
        return FdceStatus::NullArgument;
    }
    match theoretical_cdf(g) {
        Ok(c) => {
            *out = c.eval(r);
            FdceStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;
    use std::ptr;

    #[test]
    fn sfg_grid_round_trips_through_the_handle() {
        unsafe {
            let mut grid: *mut FdceGrid = ptr::null_mut();
            assert_eq!(fdce_grid_sfg(64, PI / 2.0, &mut grid), FdceStatus::Ok);
            assert_eq!(fdce_grid_len(grid), 64);

            let (mut z, mut a) = (0.0_f64, 0.0_f64);
            assert_eq!(fdce_grid_direction(grid, 0, &mut z, &mut a), FdceStatus::Ok);
            assert!(z.abs() < 1e-12, "first point is the pole, got zenith {z}");

            assert_eq!(
                fdce_grid_direction(grid, 64, &mut z, &mut a),
                FdceStatus::IndexOutOfRange
            );

            let mut angle = -1.0;
            assert_eq!(fdce_grid_min_angle(grid, z, a, &mut angle), FdceStatus::Ok);
            assert!(angle < 1e-12);

            fdce_grid_free(grid);
        }
    }

    #[test]
    fn invalid_grid_arguments_map_to_domain_errors() {
        unsafe {
            let mut grid: *mut FdceGrid = ptr::null_mut();
            assert_eq!(fdce_grid_sfg(1, PI / 2.0, &mut grid), FdceStatus::DomainError);
            assert_eq!(fdce_grid_uspd(0, 4, &mut grid), FdceStatus::DomainError);
            assert_eq!(fdce_grid_sfg(8, PI / 2.0, ptr::null_mut()), FdceStatus::NullArgument);
        }
    }

    #[test]
    fn dictionary_atoms_copy_out_as_interleaved_doubles() {
        unsafe {
            let mut grid: *mut FdceGrid = ptr::null_mut();
            assert_eq!(fdce_grid_uspd(2, 2, &mut grid), FdceStatus::Ok);
            let mut dict: *mut FdceDictionary = ptr::null_mut();
            assert_eq!(
                fdce_dictionary_new(grid, 2, 2, 0.5, 0.5, &mut dict),
                FdceStatus::Ok
            );
            assert_eq!(fdce_dictionary_len(dict), 4);
            assert_eq!(fdce_dictionary_n_elements(dict), 4);

            let mut buf = [0.0_f64; 8];
            assert_eq!(
                fdce_dictionary_atom(dict, 0, buf.as_mut_ptr(), buf.len()),
                FdceStatus::Ok
            );
            // First USPD point is the pole; the atom is the constant 1/2.
            for i in 0..4 {
                assert!((buf[2 * i] - 0.5).abs() < 1e-12);
                assert!(buf[2 * i + 1].abs() < 1e-12);
            }

            let mut small = [0.0_f64; 4];
            assert_eq!(
                fdce_dictionary_atom(dict, 0, small.as_mut_ptr(), small.len()),
                FdceStatus::BufferTooSmall
            );

            fdce_dictionary_free(dict);
            fdce_grid_free(grid);
        }
    }

    #[test]
    fn steering_vector_matches_the_library_route() {
        unsafe {
            let mut buf = [0.0_f64; 18];
            assert_eq!(
                fdce_steering_vector(PI / 3.0, PI / 4.0, 3, 3, 0.5, 0.5, buf.as_mut_ptr(), 18),
                FdceStatus::Ok
            );
            let geom = ArrayGeometry::new(3, 3, 0.5, 0.5).unwrap();
            let v = fdmimo_ce::array::steering_vector(PI / 3.0, PI / 4.0, &geom).unwrap();
            for (i, entry) in v.iter().enumerate() {
                assert!((buf[2 * i] - entry.re).abs() < 1e-15);
                assert!((buf[2 * i + 1] - entry.im).abs() < 1e-15);
            }
            assert_eq!(
                fdce_steering_vector(-1.0, 0.0, 3, 3, 0.5, 0.5, buf.as_mut_ptr(), 18),
                FdceStatus::DomainError
            );
        }
    }

    #[test]
    fn reference_cdf_values_pass_through() {
        unsafe {
            let mut r0 = 0.0;
            assert_eq!(fdce_theoretical_min_angle_radius(1024, &mut r0), FdceStatus::Ok);
            assert!((r0 - (1023.0_f64 / 1024.0).acos()).abs() < 1e-15);
            let mut f = 0.0;
            assert_eq!(fdce_theoretical_min_angle_cdf(1024, r0, &mut f), FdceStatus::Ok);
            assert!((f - 1.0).abs() < 1e-12);
            assert_eq!(
                fdce_theoretical_min_angle_radius(0, &mut r0),
                FdceStatus::DomainError
            );
        }
    }

    #[test]
    fn version_and_messages_are_nul_terminated_statics() {
        let v = fdce_version();
        assert!(!v.is_null());
        let s = unsafe { CStr::from_ptr(v) }.to_str().unwrap();
        assert_eq!(s, env!("CARGO_PKG_VERSION"));
        let m = fdce_status_message(FdceStatus::BufferTooSmall);
        let s = unsafe { CStr::from_ptr(m) }.to_str().unwrap();
        assert!(s.contains("buffer"));
    }
}
