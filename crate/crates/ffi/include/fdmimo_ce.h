#ifndef FDMIMO_CE_H
#define FDMIMO_CE_H

/* Generated by cbindgen from fdmimo-ce-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum FdceStatus {
  FDCE_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  FDCE_STATUS_NULL_ARGUMENT = 1,
  /**
   * An argument was outside its mathematical domain.
   */
  FDCE_STATUS_DOMAIN_ERROR = 2,
  /**
   * Arguments were structurally inconsistent (sizes, counts).
   */
  FDCE_STATUS_INVALID_ARGUMENT = 3,
  /**
   * An index was out of range for the addressed object.
   */
  FDCE_STATUS_INDEX_OUT_OF_RANGE = 4,
  /**
   * A caller-provided buffer is too small.
   */
  FDCE_STATUS_BUFFER_TOO_SMALL = 5,
  /**
   * A matrix that must be full rank is numerically rank deficient.
   */
  FDCE_STATUS_RANK_ERROR = 6,
  /**
   * Any other internal failure.
   */
  FDCE_STATUS_INTERNAL_ERROR = 7,
} FdceStatus;

/**
 * Opaque handle to a steering dictionary.
 */
typedef struct FdceDictionary FdceDictionary;

/**
 * Opaque handle to a candidate-direction grid.
 */
typedef struct FdceGrid FdceGrid;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static, NUL-terminated string.
 */
const char *fdce_version(void);

/**
 * Static description of a status code.
 */
const char *fdce_status_message(enum FdceStatus status);

/**
 * Builds a spherical Fibonacci grid of `g` points over zenith range
 * `angle_range` (radians in (0, pi]).
 *
 * # Safety
 * `out` must be a valid pointer to receive the handle.
 */
enum FdceStatus fdce_grid_sfg(size_t g, double angle_range, struct FdceGrid **out);

/**
 * Builds a grid uniform in the physical angles, `g_v × g_h` points.
 *
 * # Safety
 * `out` must be a valid pointer to receive the handle.
 */
enum FdceStatus fdce_grid_uspd(size_t g_v, size_t g_h, struct FdceGrid **out);

/**
 * Builds a grid uniform in the cosine (virtual) domain, `g_v × g_h` points.
 *
 * # Safety
 * `out` must be a valid pointer to receive the handle.
 */
enum FdceStatus fdce_grid_usvd(size_t g_v, size_t g_h, struct FdceGrid **out);

/**
 * Number of directions in a grid; 0 for a null handle.
 *
 * # Safety
 * `grid` must be a live handle from a `fdce_grid_*` constructor or null.
 */
size_t fdce_grid_len(const struct FdceGrid *grid);

/**
 * Reads direction `index` as (zenith, azimuth) in radians.
 *
 * # Safety
 * `grid` must be a live handle; `zenith`/`azimuth` must be writable.
 */
enum FdceStatus fdce_grid_direction(const struct FdceGrid *grid,
                                    size_t index,
                                    double *zenith,
                                    double *azimuth);

/**
 * Great-circle angle from (zenith, azimuth) to the nearest grid direction.
 *
 * # Safety
 * `grid` must be a live handle; `out` must be writable.
 */
enum FdceStatus fdce_grid_min_angle(const struct FdceGrid *grid,
                                    double zenith,
                                    double azimuth,
                                    double *out);

/**
 * Releases a grid handle. Null is ignored.
 *
 * # Safety
 * `grid` must be a handle from a `fdce_grid_*` constructor, not yet freed.
 */
void fdce_grid_free(struct FdceGrid *grid);

/**
 * Builds the steering dictionary of a grid for an `n_rows × n_cols` planar
 * array with the given element spacings (in carrier wavelengths).
 *
 * # Safety
 * `grid` must be a live handle; `out` must be a valid pointer.
 */
enum FdceStatus fdce_dictionary_new(const struct FdceGrid *grid,
                                    size_t n_rows,
                                    size_t n_cols,
                                    double spacing_v,
                                    double spacing_h,
                                    struct FdceDictionary **out);

/**
 * Number of atoms (grid size G); 0 for a null handle.
 *
 * # Safety
 * `dict` must be a live dictionary handle or null.
 */
size_t fdce_dictionary_len(const struct FdceDictionary *dict);

/**
 * Array elements per atom (N_a); 0 for a null handle.
 *
 * # Safety
 * `dict` must be a live dictionary handle or null.
 */
size_t fdce_dictionary_n_elements(const struct FdceDictionary *dict);

/**
 * Copies atom `index` into `out` as interleaved (re, im) doubles.
 * `capacity` counts doubles and must be at least `2·N_a`.
 *
 * # Safety
 * `dict` must be a live handle; `out` must point to `capacity` writable
 * doubles.
 */
enum FdceStatus fdce_dictionary_atom(const struct FdceDictionary *dict,
                                     size_t index,
                                     double *out,
                                     size_t capacity);

/**
 * Releases a dictionary handle. Null is ignored.
 *
 * # Safety
 * `dict` must be a handle from `fdce_dictionary_new`, not yet freed.
 */
void fdce_dictionary_free(struct FdceDictionary *dict);

/**
 * Evaluates the planar-array steering vector toward (zenith, azimuth) into
 * `out` as interleaved (re, im) doubles; needs `capacity ≥ 2·n_rows·n_cols`.
 *
 * # Safety
 * `out` must point to `capacity` writable doubles.
 */
enum FdceStatus fdce_steering_vector(double zenith,
                                     double azimuth,
                                     size_t n_rows,
                                     size_t n_cols,
                                     double spacing_v,
                                     double spacing_h,
                                     double *out,
                                     size_t capacity);

/**
 * Tessellation cap radius `r0` for `g` ideally uniform hemisphere points.
 *
 * # Safety
 * `out` must be writable.
 */
enum FdceStatus fdce_theoretical_min_angle_radius(size_t g, double *out);

/**
 * Reference minimal-angle CDF value at radius `r` for `g` grid points.
 *
 * # Safety
 * `out` must be writable.
 */
enum FdceStatus fdce_theoretical_min_angle_cdf(size_t g, double r, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FDMIMO_CE_H */
