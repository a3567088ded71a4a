#ifndef CONE2D_H
#define CONE2D_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum Cone2dStatus {
  CONE2D_STATUS_OK = 0,
  CONE2D_STATUS_NULL_POINTER = 1,
  CONE2D_STATUS_INVALID_UTF8 = 2,
  CONE2D_STATUS_PARSE = 3,
  CONE2D_STATUS_INVARIANT = 4,
  CONE2D_STATUS_DIMENSION = 5,
  CONE2D_STATUS_INVALID_ARGUMENT = 6,
  /**
   * The input is certified outside the cone (or the module's K_M).
   */
  CONE2D_STATUS_NOT_MEMBER = 7,
  /**
   * Rank deficiency, iteration cap or a missing separated point.
   */
  CONE2D_STATUS_NUMERICAL = 8,
  CONE2D_STATUS_IO = 9,
  CONE2D_STATUS_PANIC = 10,
} Cone2dStatus;

typedef struct Cone2dMoments Cone2dMoments;

typedef struct Cone2dPolynomial Cone2dPolynomial;

typedef struct Cone2dRegion Cone2dRegion;

typedef struct Cone2dWeight Cone2dWeight;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next call into this library on the same thread.
 */
const char *cone2d_last_error(void);

/**
 * Library version as a static string.
 */
const char *cone2d_version(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void cone2d_string_free(char *s);

/**
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
enum Cone2dStatus cone2d_polynomial_from_json(const char *json, struct Cone2dPolynomial **out);

/**
 * # Safety
 * `p` must be null or a handle from [`cone2d_polynomial_from_json`].
 */
void cone2d_polynomial_free(struct Cone2dPolynomial *p);

/**
 * Number of variables, or 0 for a null handle.
 *
 * # Safety
 * `p` must be null or a live polynomial handle.
 */
size_t cone2d_polynomial_nvars(const struct Cone2dPolynomial *p);

/**
 * Total degree; the zero polynomial has degree 0.
 *
 * # Safety
 * `p` must be null or a live polynomial handle.
 */
uint32_t cone2d_polynomial_degree(const struct Cone2dPolynomial *p);

/**
 * # Safety
 * `x` must point to `n` doubles; `out` must be writable.
 */
enum Cone2dStatus cone2d_polynomial_eval(const struct Cone2dPolynomial *p,
                                         const double *x,
                                         size_t n,
                                         double *out);

/**
 * # Safety
 * `p` must be a live handle; `out` receives a string to release with
 * [`cone2d_string_free`].
 */
enum Cone2dStatus cone2d_polynomial_to_json(const struct Cone2dPolynomial *p, char **out);

/**
 * Builds a region. Inequality files referenced by path are resolved
 * against `base_dir`, which may be null.
 *
 * # Safety
 * `json` and a non-null `base_dir` must be nul-terminated strings.
 */
enum Cone2dStatus cone2d_region_from_json(const char *json,
                                          const char *base_dir,
                                          struct Cone2dRegion **out);

/**
 * # Safety
 * `k` must be null or a live region handle.
 */
void cone2d_region_free(struct Cone2dRegion *k);

/**
 * # Safety
 * `k` must be null or a live region handle.
 */
size_t cone2d_region_sample_count(const struct Cone2dRegion *k);

/**
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
enum Cone2dStatus cone2d_weight_from_json(const char *json, struct Cone2dWeight **out);

/**
 * # Safety
 * `w` must be null or a live weight handle.
 */
void cone2d_weight_free(struct Cone2dWeight *w);

/**
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
enum Cone2dStatus cone2d_moments_from_json(const char *json, struct Cone2dMoments **out);

/**
 * # Safety
 * `l` must be null or a live moments handle.
 */
void cone2d_moments_free(struct Cone2dMoments *l);

/**
 * Sampled sup-norm of `p` over `k`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum Cone2dStatus cone2d_sup_norm(const struct Cone2dPolynomial *p,
                                  const struct Cone2dRegion *k,
                                  double *out);

/**
 * Weighted l1 norm of `p`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum Cone2dStatus cone2d_phi_norm(const struct Cone2dPolynomial *p,
                                  const struct Cone2dWeight *w,
                                  double *out);

/**
 * Single-power approximation at `count` points of dimension `n`
 * (row-major in `pts`). Writes the certificate as JSON. A negative value
 * at some point returns [`Cone2dStatus::NotMember`].
 *
 * # Safety
 * `pts` must hold `count * n` doubles; `out` must be writable.
 */
enum Cone2dStatus cone2d_tk_approximate(const struct Cone2dPolynomial *p,
                                        const double *pts,
                                        size_t count,
                                        size_t n,
                                        uint32_t d,
                                        double eps,
                                        char **out);

/**
 * Sup-norm approximation on `k`; writes the certificate as JSON.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum Cone2dStatus cone2d_sup_approximate(const struct Cone2dPolynomial *p,
                                         const struct Cone2dRegion *k,
                                         uint32_t d,
                                         double eps,
                                         uint32_t max_degree,
                                         char **out);

/**
 * Hankel PSD check. `psd` receives 1 or 0, `min_eigenvalue` the smallest
 * eigenvalue of the moment matrix; either may be null.
 *
 * # Safety
 * `l` must be a live handle.
 */
enum Cone2dStatus cone2d_hankel_psd_check(const struct Cone2dMoments *l,
                                          double tol,
                                          int32_t *psd,
                                          double *min_eigenvalue);

/**
 * Nonnegative measure on the samples of `k` matching `l`; writes the
 * recovery report as JSON.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum Cone2dStatus cone2d_measure_recover(const struct Cone2dMoments *l,
                                         const struct Cone2dRegion *k,
                                         double tol,
                                         char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONE2D_H */
