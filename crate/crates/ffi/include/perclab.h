#ifndef PERCLAB_H
#define PERCLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PlEvent {
  PL_EVENT_ONE_ARM = 0,
  PL_EVENT_TWO_ARM = 1,
} PlEvent;

typedef enum PlOriginRule {
  PL_ORIGIN_RULE_CONDITIONED_OPEN = 0,
  PL_ORIGIN_RULE_SAMPLED = 1,
} PlOriginRule;

typedef enum PlStatus {
  PL_STATUS_OK = 0,
  PL_STATUS_NULL_POINTER = 1,
  PL_STATUS_INVALID_ARGUMENT = 2,
  PL_STATUS_UNSUPPORTED = 3,
  PL_STATUS_OVERFLOW = 4,
  PL_STATUS_OUT_OF_RANGE = 5,
  PL_STATUS_NOT_BRACKETING = 6,
  PL_STATUS_INTERNAL = 7,
  PL_STATUS_PANIC = 8,
} PlStatus;

typedef enum PlVariant {
  PL_VARIANT_Z2 = 0,
  PL_VARIANT_TRI_UP = 1,
  PL_VARIANT_TRI_RIGHT = 2,
} PlVariant;

/**
 * Exact path-count row for one generation.
 */
typedef struct PlCountRow PlCountRow;

/**
 * Simulation parameters; the probability can be changed between estimates.
 */
typedef struct PlSimulation PlSimulation;

typedef struct PlBoundPoint {
  uint64_t k;
  uint64_t mid;
  double log_count;
  double b_k;
  double b_k_displayed;
  double abs_err_vs_limit;
} PlBoundPoint;

typedef struct PlEstimate {
  uint64_t hits;
  uint64_t trials;
  double phat;
  double ci_low;
  double ci_high;
} PlEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy of the last error message on this thread, or null if none.
 */
char *pl_last_error(void);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void pl_string_free(char *s);

/**
 * Static version string.
 */
const char *pl_version(void);

/**
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum PlStatus pl_count_row_new(uint64_t k, struct PlCountRow **out);

/**
 * # Safety
 * `row` must come from [`pl_count_row_new`] or be null.
 */
void pl_count_row_free(struct PlCountRow *row);

/**
 * Number of entries, `k + 1`; zero for a null handle.
 *
 * # Safety
 * `row` must be a live handle or null.
 */
size_t pl_count_row_len(const struct PlCountRow *row);

/**
 * Entry `i` as a decimal string.
 *
 * # Safety
 * `row` must be a live handle and `out` a valid pointer.
 */
enum PlStatus pl_count_row_get(const struct PlCountRow *row, uint64_t i, char **out);

/**
 * Row total (`3^k`) as a decimal string.
 *
 * # Safety
 * `row` must be a live handle and `out` a valid pointer.
 */
enum PlStatus pl_count_row_total(const struct PlCountRow *row, char **out);

/**
 * Compare the closed form with full enumeration.
 *
 * # Safety
 * `matches` must be a valid pointer.
 */
enum PlStatus pl_count_verify(uint64_t k, bool *matches);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum PlStatus pl_log_binomial(uint64_t k, uint64_t i, double *out);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum PlStatus pl_bound_at(uint64_t k, struct PlBoundPoint *out);

/**
 * Limit of the threshold sequence.
 */
double pl_bound_limit(void);

/**
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum PlStatus pl_simulation_new(enum PlVariant variant,
                                uint64_t k,
                                double p,
                                uint64_t trials,
                                uint64_t seed,
                                enum PlOriginRule origin_rule,
                                struct PlSimulation **out);

/**
 * # Safety
 * `sim` must come from [`pl_simulation_new`] or be null.
 */
void pl_simulation_free(struct PlSimulation *sim);

/**
 * # Safety
 * `sim` must be a live handle.
 */
enum PlStatus pl_simulation_set_p(struct PlSimulation *sim, double p);

/**
 * Crossing estimate; `threads == 0` uses the global pool.
 *
 * # Safety
 * `sim` must be a live handle and `out` a valid pointer.
 */
enum PlStatus pl_simulation_estimate(const struct PlSimulation *sim,
                                     enum PlEvent event,
                                     size_t threads,
                                     struct PlEstimate *out);

/**
 * Bisect for the two-arm crossing probability 1/2 on `[0, 1]`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum PlStatus pl_pc_bisect(enum PlVariant variant,
                           uint64_t k,
                           uint64_t trials,
                           uint64_t seed,
                           double tol,
                           double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PERCLAB_H */
