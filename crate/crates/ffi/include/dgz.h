#ifndef DGZ_H
#define DGZ_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stdint.h>

/**
 * Result codes shared by all functions.
 */
typedef enum DgzStatus {
  DGZ_STATUS_OK = 0,
  /**
   * A required pointer was null or a string was not UTF-8.
   */
  DGZ_STATUS_NULL_OR_INVALID = 1,
  DGZ_STATUS_INVALID_Q = 2,
  DGZ_STATUS_SCALE_EXCEEDED = 3,
  DGZ_STATUS_PARSE = 4,
  /**
   * The computation ran and a check failed.
   */
  DGZ_STATUS_CHECK_FAILED = 5,
  /**
   * Any other library error.
   */
  DGZ_STATUS_ERROR = 6,
  DGZ_STATUS_PANIC = 7,
} DgzStatus;

/**
 * A built curve `F = D1/D2` over `F_q`.
 */
typedef struct DgzCurve DgzCurve;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or null. Valid until the next failing call.
 */
const char *dgz_last_error(void);

/**
 * Builds the curve for `q`. On success `*out` owns a handle for [`dgz_curve_free`].
 *
 * # Safety
 * `out` must be a valid pointer to writable storage.
 */
enum DgzStatus dgz_curve_build(uint64_t q, struct DgzCurve **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `h` must come from [`dgz_curve_build`] and not be used afterwards.
 */
void dgz_curve_free(struct DgzCurve *h);

/**
 * `q` and the degree `q^3 - q^2` of `F`, and its number of terms.
 *
 * # Safety
 * `h` must be a live handle; output pointers may be null to skip them.
 */
enum DgzStatus dgz_curve_info(const struct DgzCurve *h,
                              uint64_t *q,
                              uint64_t *degree,
                              uint64_t *terms);

/**
 * Number of points of the curve in `PG(2, F_{q^ext})`.
 *
 * # Safety
 * `h` must be a live handle and `out` valid.
 */
enum DgzStatus dgz_count_points(const struct DgzCurve *h, uint32_t ext, uint64_t *out);

/**
 * Whether the point written like `"(1:0,1:0)"` over `F_{q^ext}` lies on the curve.
 *
 * # Safety
 * `h` must be a live handle, `point` a nul-terminated string, and `out` valid.
 */
enum DgzStatus dgz_point_on_curve(const struct DgzCurve *h,
                                  uint32_t ext,
                                  const char *point,
                                  bool *out);

/**
 * Runs one named suite. Returns [`DgzStatus::CheckFailed`] when a check fails,
 * [`DgzStatus::ScaleExceeded`] when the suite does not run at this `q`.
 *
 * # Safety
 * `h` must be a live handle and `suite` a nul-terminated string.
 */
enum DgzStatus dgz_run_suite(const struct DgzCurve *h, const char *suite, uint64_t seed);

/**
 * `F` in the text exchange format. Free the string with [`dgz_string_free`].
 *
 * # Safety
 * `h` must be a live handle and `out` valid.
 */
enum DgzStatus dgz_curve_to_text(const struct DgzCurve *h, char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void dgz_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DGZ_H */
