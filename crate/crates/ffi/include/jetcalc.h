#ifndef JETCALC_H
#define JETCALC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes shared by all entry points.
 */
typedef enum JetcalcStatus {
  JETCALC_STATUS_OK = 0,
  /**
   * A scenario ran and at least one check failed.
   */
  JETCALC_STATUS_CHECK_FAILED = 1,
  /**
   * Malformed JSON, unknown fields or an unsupported schema version.
   */
  JETCALC_STATUS_SCHEMA = 2,
  /**
   * A computation exceeded its configured bound.
   */
  JETCALC_STATUS_RESOURCE_BOUND = 3,
  JETCALC_STATUS_NULL_POINTER = 4,
  JETCALC_STATUS_INVALID_UTF8 = 5,
  /**
   * Mathematically invalid input, such as a singular arrow.
   */
  JETCALC_STATUS_INVALID_INPUT = 6,
  /**
   * An internal panic was caught at the boundary.
   */
  JETCALC_STATUS_INTERNAL = 7,
} JetcalcStatus;

/**
 * Opaque jet arrow.
 */
typedef struct JetcalcArrow JetcalcArrow;

/**
 * Opaque finite-dimensional Lie algebra.
 */
typedef struct JetcalcLieAlgebra JetcalcLieAlgebra;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread; valid until the next failing call.
 */
const char *jetcalc_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *jetcalc_version(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from a `char **` out-parameter of this library and not be freed twice.
 */
void jetcalc_string_free(char *s);

/**
 * Parses and runs a scenario, writing the JSON report to `report_out`.
 *
 * Returns `Ok` when all checks pass and `CheckFailed` when the report records
 * a failure; the report is written in both cases.
 *
 * # Safety
 * `scenario_json` must be a NUL-terminated string and `report_out` writable.
 */
enum JetcalcStatus jetcalc_run_scenario(const char *scenario_json,
                                        uint64_t seed,
                                        char **report_out);

/**
 * Number of coefficients per component of an order-`order` arrow in `n` variables.
 */
size_t jetcalc_arrow_coefficient_count(size_t n, size_t order);

/**
 * Builds an arrow from its source, target and derivative values.
 *
 * `coeffs` holds `n * jetcalc_arrow_coefficient_count(n, order)` rationals,
 * row `i` listing `∂^α g^i` over multi-indices of order `1..=order` in graded order.
 *
 * # Safety
 * The arrays must have the stated lengths and hold NUL-terminated strings.
 */
enum JetcalcStatus jetcalc_arrow_new(size_t n,
                                     size_t order,
                                     const char *const *source,
                                     const char *const *target,
                                     const char *const *coeffs,
                                     size_t coeffs_len,
                                     struct JetcalcArrow **out);

/**
 * The identity arrow of order `order` at `point`.
 *
 * # Safety
 * `point` must hold `n` NUL-terminated strings.
 */
enum JetcalcStatus jetcalc_arrow_identity(size_t n,
                                          size_t order,
                                          const char *const *point,
                                          struct JetcalcArrow **out);

/**
 * `second ∘ first`; the target of `first` must be the source of `second`.
 *
 * # Safety
 * Both handles must be live.
 */
enum JetcalcStatus jetcalc_arrow_compose(const struct JetcalcArrow *second,
                                         const struct JetcalcArrow *first,
                                         struct JetcalcArrow **out);

/**
 * # Safety
 * `a` must be live.
 */
enum JetcalcStatus jetcalc_arrow_invert(const struct JetcalcArrow *a, struct JetcalcArrow **out);

/**
 * Truncation to a lower order.
 *
 * # Safety
 * `a` must be live.
 */
enum JetcalcStatus jetcalc_arrow_project(const struct JetcalcArrow *a,
                                         size_t order,
                                         struct JetcalcArrow **out);

/**
 * Writes `1` to `equal` when the arrows coincide, else `0`.
 *
 * # Safety
 * Both handles must be live.
 */
enum JetcalcStatus jetcalc_arrow_equal(const struct JetcalcArrow *a,
                                       const struct JetcalcArrow *b,
                                       int32_t *equal);

/**
 * JSON `{"order", "source", "target", "coeffs"}` with rationals as strings.
 *
 * # Safety
 * `a` must be live and `json_out` writable.
 */
enum JetcalcStatus jetcalc_arrow_to_json(const struct JetcalcArrow *a, char **json_out);

/**
 * # Safety
 * `a` must come from this library and not be used afterwards. Null is ignored.
 */
void jetcalc_arrow_free(struct JetcalcArrow *a);

/**
 * Builds a Lie algebra from the scenario algebra encoding
 * `{"dim": d, "brackets": [{"i", "j", "result": [{"index", "value"}]}]}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string.
 */
enum JetcalcStatus jetcalc_lie_algebra_from_json(const char *json, struct JetcalcLieAlgebra **out);

/**
 * Lie algebra of the order-`k` jet group in `n` variables.
 *
 * # Safety
 * `out` must be writable.
 */
enum JetcalcStatus jetcalc_lie_algebra_jet_group(size_t n,
                                                 size_t k,
                                                 struct JetcalcLieAlgebra **out);

/**
 * # Safety
 * `g` must be live and `dim` writable.
 */
enum JetcalcStatus jetcalc_lie_algebra_dim(const struct JetcalcLieAlgebra *g, size_t *dim);

/**
 * JSON `{"lower_central_series", "nilpotent", "abelian"}`.
 *
 * # Safety
 * `g` must be live and `json_out` writable.
 */
enum JetcalcStatus jetcalc_lie_algebra_nilpotency(const struct JetcalcLieAlgebra *g,
                                                  char **json_out);

/**
 * # Safety
 * `g` must come from this library and not be used afterwards. Null is ignored.
 */
void jetcalc_lie_algebra_free(struct JetcalcLieAlgebra *g);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JETCALC_H */
