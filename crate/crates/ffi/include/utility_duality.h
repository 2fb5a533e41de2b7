#ifndef UTILITY_DUALITY_H
#define UTILITY_DUALITY_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible call.
 */
typedef enum UdStatus {
  UD_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  UD_STATUS_NULL_POINTER = 1,
  /**
   * A parameter was rejected (bad shape, empty list, unsupported curve).
   */
  UD_STATUS_INVALID_ARGUMENT = 2,
  /**
   * A point or curve lies outside the expected domain.
   */
  UD_STATUS_DOMAIN_ERROR = 3,
  /**
   * Quadrature or root finding failed, or a target is unreachable.
   */
  UD_STATUS_NUMERIC_FAILURE = 4,
  /**
   * A Rust panic was caught at the boundary.
   */
  UD_STATUS_PANIC = 5,
} UdStatus;

/**
 * Opaque curve handle: a lottery CDF or a normalized utility.
 */
typedef struct UdCurve UdCurve;

typedef struct UdDualityResult {
  double expected_utility;
  double expected_disutility;
  double certain_equivalent;
  double aspiration_equivalent;
} UdDualityResult;

typedef struct UdTargetUpdate {
  double effective_gamma;
  double new_target;
  double old_exceed_prob;
  double new_exceed_prob;
} UdTargetUpdate;

typedef struct UdSaddle {
  /**
   * Whether `row`, `col` and `value` describe a pure saddle.
   */
  bool has_saddle;
  size_t row;
  size_t col;
  double value;
  double maximin;
  size_t maximin_row;
  double minimax;
  size_t minimax_col;
} UdSaddle;

typedef struct UdAllocationPair {
  size_t lottery;
  size_t utility;
  double eu;
  double ce;
  double ae;
  /**
   * Whether this stage was settled by a pure saddle.
   */
  bool had_pure_saddle;
} UdAllocationPair;

typedef struct UdAllocationSums {
  double sum_ce;
  double sum_ae;
  double sum_eu;
} UdAllocationSums;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static nul-terminated string.
 */
const char *ud_version(void);

/**
 * Message for the last failed call on this thread, or null if the last
 * call succeeded. Valid until the next library call on the same thread.
 */
const char *ud_last_error(void);

/**
 * # Safety
 * `out` must be null or valid for writing one pointer.
 */
enum UdStatus ud_curve_uniform(double lo, double hi, struct UdCurve **out);

/**
 * # Safety
 * `out` must be null or valid for writing one pointer.
 */
enum UdStatus ud_curve_linear(double lo, double hi, struct UdCurve **out);

/**
 * # Safety
 * `out` must be null or valid for writing one pointer.
 */
enum UdStatus ud_curve_triangular(double lo, double hi, double mode, struct UdCurve **out);

/**
 * # Safety
 * `out` must be null or valid for writing one pointer.
 */
enum UdStatus ud_curve_scaled_beta(double lo,
                                   double hi,
                                   double alpha,
                                   double beta,
                                   struct UdCurve **out);

/**
 * Normalized exponential utility with risk-aversion coefficient `gamma`
 * (nonzero; negative is risk seeking).
 *
 * # Safety
 * `out` must be null or valid for writing one pointer.
 */
enum UdStatus ud_curve_exponential(double lo, double hi, double gamma, struct UdCurve **out);

/**
 * Normalized exponential utility with risk tolerance `rho = 1 / gamma`.
 *
 * # Safety
 * `out` must be null or valid for writing one pointer.
 */
enum UdStatus ud_curve_exponential_tolerance(double lo,
                                             double hi,
                                             double rho,
                                             struct UdCurve **out);

/**
 * # Safety
 * `out` must be null or valid for writing one pointer.
 */
enum UdStatus ud_curve_truncated_gaussian(double lo,
                                          double hi,
                                          double mu,
                                          double sigma,
                                          struct UdCurve **out);

/**
 * # Safety
 * `out` must be null or valid for writing one pointer.
 */
enum UdStatus ud_curve_log_wealth(double lo, double hi, double wealth, struct UdCurve **out);

/**
 * Degenerate lottery (or threshold utility) jumping from 0 to 1 at `at`.
 *
 * # Safety
 * `out` must be null or valid for writing one pointer.
 */
enum UdStatus ud_curve_step(double lo, double hi, double at, struct UdCurve **out);

/**
 * Piecewise-linear curve through `n` knots `(xs[i], ys[i])`.
 *
 * # Safety
 * `xs` and `ys` must be null or valid for reading `n` doubles; `out` must
 * be null or valid for writing one pointer.
 */
enum UdStatus ud_curve_piecewise_linear(double lo,
                                        double hi,
                                        const double *xs,
                                        const double *ys,
                                        size_t n,
                                        struct UdCurve **out);

/**
 * Releases a curve. Null is ignored.
 *
 * # Safety
 * `curve` must be null or a handle from a `ud_curve_*` constructor that
 * has not been freed.
 */
void ud_curve_free(struct UdCurve *curve);

/**
 * # Safety
 * `curve` must be null or a live handle; `out` null or writable.
 */
enum UdStatus ud_curve_value(const struct UdCurve *curve, double x, double *out);

/**
 * Generalized inverse: the smallest `x` with `value(x) >= p`.
 *
 * # Safety
 * `curve` must be null or a live handle; `out` null or writable.
 */
enum UdStatus ud_curve_quantile(const struct UdCurve *curve, double p, double *out);

/**
 * EU, EDU, CE and AE of a lottery under a utility on the same domain.
 *
 * # Safety
 * Handles must be null or live; `out` null or writable.
 */
enum UdStatus ud_evaluate_pair(const struct UdCurve *lottery,
                               const struct UdCurve *utility,
                               struct UdDualityResult *out);

/**
 * Risk-aversion coefficient whose exponential utility makes `target` the
 * lottery's aspiration equivalent. Zero means the linear utility.
 *
 * # Safety
 * `lottery` must be null or live; `out` null or writable.
 */
enum UdStatus ud_effective_gamma(const struct UdCurve *lottery, double target, double *out);

/**
 * Carries a target from `old_lottery` to `new_lottery` at constant
 * effective risk aversion.
 *
 * # Safety
 * Handles must be null or live; `out` null or writable.
 */
enum UdStatus ud_update_target(const struct UdCurve *old_lottery,
                               double old_target,
                               const struct UdCurve *new_lottery,
                               struct UdTargetUpdate *out);

/**
 * Pure saddle of a row-major `rows x cols` matrix (rows maximize,
 * columns minimize), with maximin and minimax.
 *
 * # Safety
 * `values` must be null or valid for reading `rows * cols` doubles; `out`
 * null or writable.
 */
enum UdStatus ud_find_pure_saddle(const double *values,
                                  size_t rows,
                                  size_t cols,
                                  struct UdSaddle *out);

/**
 * Stage-by-stage saddle allocation of `n` lotteries to `n` utilities.
 * Writes `n` pairs in stage order to `pairs` and the totals to `sums`
 * (which may be null).
 *
 * # Safety
 * `lotteries` and `utilities` must be null or valid for reading `n` live
 * handles; `pairs` null or writable for `n` elements; `sums` null or
 * writable.
 */
enum UdStatus ud_allocate(const struct UdCurve *const *lotteries,
                          const struct UdCurve *const *utilities,
                          size_t n,
                          struct UdAllocationPair *pairs,
                          struct UdAllocationSums *sums);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UTILITY_DUALITY_H */
