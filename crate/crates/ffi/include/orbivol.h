/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef ORBIVOL_H
#define ORBIVOL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OrbivolStatus {
  ORBIVOL_STATUS_OK = 0,
  // Arguments outside the operation's domain.
  ORBIVOL_STATUS_USAGE = 1,
  // An input matrix fails a structural check (e.g. is not Lorentz).
  ORBIVOL_STATUS_INVARIANT_VIOLATION = 2,
  // An iterative routine did not converge.
  ORBIVOL_STATUS_NUMERICAL = 3,
  ORBIVOL_STATUS_OVERFLOW = 4,
  ORBIVOL_STATUS_NULL_POINTER = 5,
  // The caller's buffer is shorter than the data to copy.
  ORBIVOL_STATUS_BUFFER_TOO_SMALL = 6,
  // Internal error; the library caught a panic.
  ORBIVOL_STATUS_PANIC = 7,
} OrbivolStatus;

// Result of a bound computation.
typedef struct OrbivolBound OrbivolBound;

// An isometry of hyperbolic `n`-space as an `(n+1)×(n+1)` Lorentz matrix.
typedef struct OrbivolMatrix OrbivolMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Static description of a status code. Never NULL; never freed.
const char *orbivol_status_message(enum OrbivolStatus status);

// Detail of the last failure on this thread, or "" after a success. The
// pointer stays valid until the next call into this library on the same
// thread.
const char *orbivol_last_error_message(void);

// The library version as a static NUL-terminated string.
const char *orbivol_version(void);

// The positive root of `2τ(1+τ)² = 1`.
double orbivol_jorgensen_tau(void);

// `c_k = 2 sin²(π/k) e⁻²` for `k ≥ 2`.
//
// # Safety
// `out` must be NULL or valid for writes.
enum OrbivolStatus orbivol_c_k(uint32_t k, double *out);

// Lower bound on `‖A - I‖` for an elliptic `A` of order at most `k` whose
// fixed set lies at distance `delta` from the basepoint.
//
// # Safety
// `out` must be NULL or valid for writes.
enum OrbivolStatus orbivol_norm_lower_bound(uint32_t k, double delta, double *out);

// `ln κ(r)` for `r > 0`.
//
// # Safety
// `out` must be NULL or valid for writes.
enum OrbivolStatus orbivol_log_kappa(double r, double *out);

// Natural log of the volume of a radius-`r` ball in hyperbolic `n`-space.
//
// # Safety
// `out` must be NULL or valid for writes.
enum OrbivolStatus orbivol_log_ball_volume(size_t n, double r, double *out);

// Computes `𝒜(n,k)`. On success `*out` owns a handle to release with
// [`orbivol_bound_free`].
//
// # Safety
// `out` must be NULL or valid for writes.
enum OrbivolStatus orbivol_bound_compute(size_t n, uint32_t k, struct OrbivolBound **out);

// `ln 𝒜(n,k)`; NaN for a NULL handle.
//
// # Safety
// `bound` must be NULL or a live handle.
double orbivol_bound_log_a(const struct OrbivolBound *bound);

// `log₁₀ 𝒜(n,k)`; NaN for a NULL handle.
//
// # Safety
// `bound` must be NULL or a live handle.
double orbivol_bound_log10_a(const struct OrbivolBound *bound);

// The maximizing radius; NaN for a NULL handle.
//
// # Safety
// `bound` must be NULL or a live handle.
double orbivol_bound_r_star(const struct OrbivolBound *bound);

// `ln Vol B(r*)`; NaN for a NULL handle.
//
// # Safety
// `bound` must be NULL or a live handle.
double orbivol_bound_log_ball_volume(const struct OrbivolBound *bound);

// `ln H(n,k,r*)`; NaN for a NULL handle.
//
// # Safety
// `bound` must be NULL or a live handle.
double orbivol_bound_log_packing_count(const struct OrbivolBound *bound);

// Releases a bound handle.
//
// # Safety
// `bound` must be NULL or a handle from [`orbivol_bound_compute`] that has
// not been freed.
void orbivol_bound_free(struct OrbivolBound *bound);

// Group-order bound `⌊factor · V / 𝒜(n,k)⌋` with `factor = 2` when
// `out_variant` is set. The volume is passed as `log₁₀ V` so volumes below
// the smallest double are usable. When the bound does not fit below `2⁶³`,
// `*saturated` is set and `*bound` is `INT64_MAX`.
//
// # Safety
// `bound` and `saturated` must be NULL or valid for writes.
enum OrbivolStatus orbivol_hurwitz(double log10_volume,
                                   size_t n,
                                   uint32_t k,
                                   bool out_variant,
                                   uint64_t *bound,
                                   bool *saturated);

// The boost by `delta` along the first spatial axis of hyperbolic `n`-space.
//
// # Safety
// `out` must be NULL or valid for writes.
enum OrbivolStatus orbivol_matrix_boost(size_t n, double delta, struct OrbivolMatrix **out);

// A seeded random isometry moving the basepoint by at most `max_translation`.
//
// # Safety
// `out` must be NULL or valid for writes.
enum OrbivolStatus orbivol_matrix_random_isometry(size_t n,
                                                  double max_translation,
                                                  uint64_t seed,
                                                  struct OrbivolMatrix **out);

// A seeded random elliptic isometry of exact order `k` whose fixed set lies
// at distance `delta` from the basepoint. The measured distance is written
// to `*measured_delta` when that pointer is not NULL.
//
// # Safety
// `out` must be NULL or valid for writes; `measured_delta` must be NULL or
// valid for writes.
enum OrbivolStatus orbivol_matrix_sample_elliptic(size_t n,
                                                  uint32_t k,
                                                  double delta,
                                                  uint64_t seed,
                                                  struct OrbivolMatrix **out,
                                                  double *measured_delta);

// Wraps `(n+1)²` row-major entries as a Lorentz matrix after checking
// `AᵀJA = J` and `a₁₁ ≥ 1`.
//
// # Safety
// `entries` must be NULL or point to `(n+1)²` readable doubles; `out` must
// be NULL or valid for writes.
enum OrbivolStatus orbivol_matrix_from_entries(size_t n,
                                               const double *entries,
                                               struct OrbivolMatrix **out);

// The hyperbolic dimension `n` of a matrix handle, so the matrix is
// `(n+1)×(n+1)`; 0 for NULL.
//
// # Safety
// `m` must be NULL or a live handle.
size_t orbivol_matrix_dim(const struct OrbivolMatrix *m);

// Copies the entries in row-major order into `buf`, which must hold at least
// `(n+1)²` doubles; `len` is its capacity.
//
// # Safety
// `m` must be NULL or a live handle; `buf` must be NULL or valid for `len`
// writes.
enum OrbivolStatus orbivol_matrix_copy_entries(const struct OrbivolMatrix *m,
                                               double *buf,
                                               size_t len);

// Spectral norm `‖A‖`.
//
// # Safety
// `m` must be NULL or a live handle; `out` must be NULL or valid for writes.
enum OrbivolStatus orbivol_matrix_operator_norm(const struct OrbivolMatrix *m, double *out);

// Spectral norm `‖A - I‖`.
//
// # Safety
// `m` must be NULL or a live handle; `out` must be NULL or valid for writes.
enum OrbivolStatus orbivol_matrix_distance_to_identity(const struct OrbivolMatrix *m, double *out);

// Distance from the basepoint to the fixed set of `A` in hyperbolic space.
//
// # Safety
// `m` must be NULL or a live handle; `out` must be NULL or valid for writes.
enum OrbivolStatus orbivol_matrix_fixed_set_distance(const struct OrbivolMatrix *m, double *out);

// Releases a matrix handle.
//
// # Safety
// `m` must be NULL or a handle from this library that has not been freed.
void orbivol_matrix_free(struct OrbivolMatrix *m);

// Runs the default verification suite with `trials` trials per case.
// Writes whether every case passed and the total number of violations.
//
// # Safety
// `passed` and `violations` must be NULL or valid for writes.
enum OrbivolStatus orbivol_verify_run_all(uint64_t trials,
                                          uint64_t seed,
                                          bool *passed,
                                          uint64_t *violations);

// Like [`orbivol_verify_run_all`], returning the per-case reports as a JSON
// array in a newly allocated string to release with [`orbivol_string_free`].
//
// # Safety
// `out` must be NULL or valid for writes.
enum OrbivolStatus orbivol_verify_report_json(uint64_t trials, uint64_t seed, char **out);

// Releases a string returned by this library.
//
// # Safety
// `s` must be NULL or a string from this library that has not been freed.
void orbivol_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ORBIVOL_H */
