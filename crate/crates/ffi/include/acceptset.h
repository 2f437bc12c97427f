#ifndef ACCEPTSET_H
#define ACCEPTSET_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AcceptsetStatus {
  ACCEPTSET_STATUS_OK = 0,
  ACCEPTSET_STATUS_NULL_POINTER = 1,
  ACCEPTSET_STATUS_INVALID_UTF8 = 2,
  ACCEPTSET_STATUS_PARSE = 3,
  ACCEPTSET_STATUS_INVALID_ARGUMENT = 4,
  ACCEPTSET_STATUS_INTERNAL = 5,
} AcceptsetStatus;

typedef enum AcceptsetQuantileSide {
  ACCEPTSET_QUANTILE_SIDE_LEFT = 0,
  ACCEPTSET_QUANTILE_SIDE_RIGHT = 1,
} AcceptsetQuantileSide;

/**
 * Opaque handle to a finitely supported distribution.
 */
typedef struct AcceptsetDistribution AcceptsetDistribution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Build a distribution from comma-separated values and probabilities.
 * A null or empty `probabilities` gives equal weights.
 *
 * # Safety
 * String arguments must be null or NUL-terminated; `out` must be writable.
 */
enum AcceptsetStatus acceptset_distribution_new(const char *values,
                                                const char *probabilities,
                                                struct AcceptsetDistribution **out);

/**
 * # Safety
 * `d` must be null or a handle from `acceptset_distribution_new` not yet freed.
 */
void acceptset_distribution_free(struct AcceptsetDistribution *d);

/**
 * Number of distinct atoms.
 *
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
enum AcceptsetStatus acceptset_distribution_len(const struct AcceptsetDistribution *d, size_t *out);

/**
 * `P(X <= x)`.
 *
 * # Safety
 * `d` must be a live handle; `x` NUL-terminated; outputs null or writable.
 */
enum AcceptsetStatus acceptset_cdf(const struct AcceptsetDistribution *d,
                                   const char *x,
                                   char **exact,
                                   double *approx);

/**
 * Left or right quantile at `level` in [0,1]; may be infinite at the ends.
 *
 * # Safety
 * `d` must be a live handle; `level` NUL-terminated; outputs null or writable.
 */
enum AcceptsetStatus acceptset_quantile(const struct AcceptsetDistribution *d,
                                        const char *level,
                                        enum AcceptsetQuantileSide side,
                                        char **exact,
                                        double *approx);

/**
 * Evaluate a risk measure such as `"VaRLower:0.99"`, `"VaRUpper:1/2"`,
 * `"ES:0.975"`, `"Distortion:0:0,1/2:1,1:1"` or `"Mean"`.
 *
 * # Safety
 * `d` must be a live handle; `measure` NUL-terminated; outputs null or writable.
 */
enum AcceptsetStatus acceptset_risk_measure(const struct AcceptsetDistribution *d,
                                            const char *measure,
                                            char **exact,
                                            double *approx);

/**
 * Decide membership in an acceptance set such as `"APlus:0.99"`,
 * `"AMinus:1/2"`, `"AZero:0.9"` or `"ESInduced:0.5"`.
 *
 * # Safety
 * `d` must be a live handle; `set` NUL-terminated; `accepted` writable.
 */
enum AcceptsetStatus acceptset_member(const struct AcceptsetDistribution *d,
                                      const char *set,
                                      bool *accepted);

/**
 * Smallest level whose closed set matches the strict set at `alpha` on
 * `n` equally likely states.
 *
 * # Safety
 * `alpha` NUL-terminated; outputs null or writable.
 */
enum AcceptsetStatus acceptset_alpha_prime(uint64_t n,
                                           const char *alpha,
                                           char **exact,
                                           double *approx);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void acceptset_string_free(char *s);

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next call into the library on the same thread.
 */
const char *acceptset_last_error_message(void);

const char *acceptset_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ACCEPTSET_H */
