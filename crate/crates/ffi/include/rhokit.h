#ifndef RHOKIT_H
#define RHOKIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum RhoStatus {
  RHO_STATUS_OK = 0,
  RHO_STATUS_INVALID_INPUT = 1,
  RHO_STATUS_NUMERIC = 2,
  RHO_STATUS_NULL_POINTER = 3,
  RHO_STATUS_BUFFER_TOO_SMALL = 4,
  RHO_STATUS_PANIC = 5,
} RhoStatus;

/**
 * Opaque square complex matrix.
 */
typedef struct RhoMatrix RhoMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success. Valid until the
 * next call on the same thread.
 */
const char *rho_last_error_message(void);

/**
 * Builds a `dim × dim` matrix from row-major real and imaginary parts.
 *
 * # Safety
 * `re` and `im` must point to `dim * dim` doubles; `out` must be writable.
 */
enum RhoStatus rho_matrix_new(size_t dim,
                              const double *re,
                              const double *im,
                              struct RhoMatrix **out);

/**
 * # Safety
 * `m` must be null or a handle not yet freed.
 */
void rho_matrix_free(struct RhoMatrix *m);

/**
 * Dimension of `m`, or 0 for a null handle.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
size_t rho_matrix_dim(const struct RhoMatrix *m);

/**
 * Copies the row-major entries into `re` and `im`, each of length `len ≥ dim²`.
 *
 * # Safety
 * `re` and `im` must be writable for `len` doubles.
 */
enum RhoStatus rho_matrix_entries(const struct RhoMatrix *m, double *re, double *im, size_t len);

/**
 * The `(n+1) × (n+1)` truncated shift with superdiagonal weight `b`.
 *
 * # Safety
 * `out` must be writable.
 */
enum RhoStatus rho_shift(size_t n, double b, struct RhoMatrix **out);

/**
 * The truncated shift of size `n+1` scaled so that `w_ρ = 1`.
 *
 * # Safety
 * `out` must be writable.
 */
enum RhoStatus rho_normalized_shift(size_t n, double rho, struct RhoMatrix **out);

/**
 * The canonical form in `C₂` of the Harnack part of the normalized shift.
 *
 * # Safety
 * `out` must be writable.
 */
enum RhoStatus rho_canonical_form_c2(size_t n, double theta, struct RhoMatrix **out);

/**
 * `w_ρ(T)` by bisection on the default disc grid.
 *
 * # Safety
 * `m` must be a live handle and `out` writable.
 */
enum RhoStatus rho_radius(const struct RhoMatrix *m, double rho, double tol, double *out);

/**
 * `w_ρ(S_{n+1}(1))` to full precision.
 *
 * # Safety
 * `out` must be writable.
 */
enum RhoStatus rho_shift_radius(size_t n, double rho, double *out);

/**
 * Ascending eigenvalues of the ρ-kernel of `m` at `z`, written to `out[0..dim]`.
 *
 * # Safety
 * `m` must be a live handle and `out` writable for `len` doubles.
 */
enum RhoStatus rho_kernel_eigenvalues(const struct RhoMatrix *m,
                                      double z_re,
                                      double z_im,
                                      double rho,
                                      double *out,
                                      size_t len);

/**
 * Harnack equivalence of `t1` and `t0` in `C_ρ` through nullspace equality on the torus.
 *
 * # Safety
 * `t1`, `t0` must be live handles and `out` writable.
 */
enum RhoStatus rho_harnack_equivalent(const struct RhoMatrix *t1,
                                      const struct RhoMatrix *t0,
                                      double rho,
                                      bool *out);

/**
 * The phase-fixed null vector of `K_1^ρ` for the normalized shift, written to
 * `re[0..=n]`, `im[0..=n]`.
 *
 * # Safety
 * `re` and `im` must be writable for `len` doubles.
 */
enum RhoStatus rho_null_profile(size_t n, double rho, double *re, double *im, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RHOKIT_H */
