#ifndef POVERTY_TRAP_H
#define POVERTY_TRAP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum PtStatus {
  PT_STATUS_OK = 0,
  PT_STATUS_NULL_POINTER = 1,
  PT_STATUS_INVALID_PARAMETER = 2,
  /**
   * Initial capital below the critical capital of the scheme.
   */
  PT_STATUS_INVALID_CAPITAL = 3,
  /**
   * Argument outside the domain of a formula.
   */
  PT_STATUS_DOMAIN = 4,
  PT_STATUS_NON_CONVERGENCE = 5,
  /**
   * Pole, divergence or integer-parameter case of a special function.
   */
  PT_STATUS_SPECIAL_FUNCTION = 6,
  PT_STATUS_SINGULAR_MATCHING = 7,
  /**
   * The root finder could not bracket or found a non-monotone objective.
   */
  PT_STATUS_ROOT_FAILURE = 8,
  PT_STATUS_UNSUPPORTED = 9,
  /**
   * A Rust panic was caught at the boundary.
   */
  PT_STATUS_PANIC = 10,
} PtStatus;

typedef enum PtSubsidyRateMode {
  PT_SUBSIDY_RATE_MODE_PAPER_LITERAL = 0,
  PT_SUBSIDY_RATE_MODE_DIMENSIONAL = 1,
} PtSubsidyRateMode;

typedef enum PtMatching {
  PT_MATCHING_FLUX_CONTINUITY = 0,
  PT_MATCHING_SMOOTH_PASTING = 1,
} PtMatching;

typedef enum PtPremiumMapping {
  PT_PREMIUM_MAPPING_DRIFT_ABSORPTION = 0,
  PT_PREMIUM_MAPPING_RATE_SCALING = 1,
} PtPremiumMapping;

typedef enum PtVerdict {
  PT_VERDICT_ROOT = 0,
  PT_VERDICT_ALL_SUBSIDY_INSUFFICIENT = 1,
  PT_VERDICT_NO_SUBSIDY_NEEDED = 2,
  PT_VERDICT_NO_BARRIER_NEEDED = 3,
  PT_VERDICT_BARRIER_INSUFFICIENT = 4,
} PtVerdict;

/**
 * Opaque model parameters.
 */
typedef struct PtModel PtModel;

/**
 * Opaque protection scheme.
 */
typedef struct PtScheme PtScheme;

/**
 * Settings shared by the evaluation calls. Passing NULL uses [`pt_options_default`].
 */
typedef struct PtOptions {
  /**
   * Discount rate of the subsidy value.
   */
  double delta;
  /**
   * Cost of lifting a trapped household out of poverty.
   */
  double m_cost;
  enum PtSubsidyRateMode subsidy_rate_mode;
  enum PtMatching matching;
} PtOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *pt_version(void);

/**
 * Message of the last failed call on this thread, or an empty string.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *pt_last_error_message(void);

/**
 * Static name of a status code, e.g. `"InvalidParameter"`.
 */
const char *pt_status_name(enum PtStatus status);

/**
 * Default options: discount 0.9, trapping cost 8, literal subsidy rate, flux continuity.
 */
struct PtOptions pt_options_default(void);

/**
 * # Safety
 * `out` must be a valid pointer to a `PtModel*`.
 */
enum PtStatus pt_model_new(double r,
                           double lambda,
                           double alpha,
                           double x_star,
                           struct PtModel **out);

/**
 * # Safety
 * `model` must be NULL or a handle from `pt_model_new` not yet freed.
 */
void pt_model_free(struct PtModel *model);

/**
 * # Safety
 * `model` must be a live model handle and `out` a valid pointer.
 */
enum PtStatus pt_scheme_uninsured(const struct PtModel *model, struct PtScheme **out);

/**
 * # Safety
 * `model` must be a live model handle and `out` a valid pointer.
 */
enum PtStatus pt_scheme_insured(const struct PtModel *model,
                                double kappa,
                                double theta,
                                enum PtPremiumMapping premium_mapping,
                                struct PtScheme **out);

/**
 * Insured scheme whose loading is cut from `theta` to `theta_star` by a government subsidy.
 *
 * # Safety
 * `model` must be a live model handle and `out` a valid pointer.
 */
enum PtStatus pt_scheme_subsidised(const struct PtModel *model,
                                   double kappa,
                                   double theta,
                                   double theta_star,
                                   enum PtPremiumMapping premium_mapping,
                                   struct PtScheme **out);

/**
 * Scheme whose premium is paid by the government while capital is below `barrier`.
 *
 * # Safety
 * `model` must be a live model handle and `out` a valid pointer.
 */
enum PtStatus pt_scheme_barrier(const struct PtModel *model,
                                double kappa,
                                double theta,
                                double barrier,
                                enum PtPremiumMapping premium_mapping,
                                struct PtScheme **out);

/**
 * Replace the insured growth rate and critical capital of a scheme.
 *
 * # Safety
 * `scheme` and `model` must be live handles.
 */
enum PtStatus pt_scheme_set_insured_dynamics(struct PtScheme *scheme,
                                             const struct PtModel *model,
                                             double r_ins,
                                             double x_star_ins);

/**
 * Critical capital below which the household is trapped under this scheme.
 *
 * # Safety
 * `scheme` must be a live handle.
 */
enum PtStatus pt_scheme_critical_capital(const struct PtScheme *scheme, double *out);

/**
 * # Safety
 * `scheme` must be NULL or a handle from a `pt_scheme_*` constructor not yet freed.
 */
void pt_scheme_free(struct PtScheme *scheme);

/**
 * Infinite-horizon trapping probability from capital `x`.
 *
 * # Safety
 * Handles must be live; `opts` may be NULL; `out` must be valid.
 */
enum PtStatus pt_trapping_probability(const struct PtModel *model,
                                      const struct PtScheme *scheme,
                                      double x,
                                      const struct PtOptions *opts,
                                      double *out);

/**
 * Laplace transform of the trapping time at rate `delta` (`delta = 0` gives the probability).
 *
 * # Safety
 * Handles must be live; `opts` may be NULL; `out` must be valid.
 */
enum PtStatus pt_laplace_trapping(const struct PtModel *model,
                                  const struct PtScheme *scheme,
                                  double x,
                                  double delta,
                                  const struct PtOptions *opts,
                                  double *out);

/**
 * `E[tau 1{tau < inf}]`. An integer `lambda / r` is handled by averaging nearby rates.
 *
 * # Safety
 * Handles must be live; `opts` may be NULL; `out` must be valid.
 */
enum PtStatus pt_expected_trapping_time(const struct PtModel *model,
                                        const struct PtScheme *scheme,
                                        double x,
                                        const struct PtOptions *opts,
                                        double *out);

/**
 * Present value of government subsidies, discounted at `opts->delta`.
 *
 * # Safety
 * Handles must be live; `opts` may be NULL; `out` must be valid.
 */
enum PtStatus pt_subsidy_value(const struct PtModel *model,
                               const struct PtScheme *scheme,
                               double x,
                               const struct PtOptions *opts,
                               double *out);

/**
 * Subsidy value plus `opts->m_cost` times the trapping probability.
 *
 * # Safety
 * Handles must be live; `opts` may be NULL; `out` must be valid.
 */
enum PtStatus pt_cost(const struct PtModel *model,
                      const struct PtScheme *scheme,
                      double x,
                      const struct PtOptions *opts,
                      double *out);

/**
 * Loading `theta*` at which the subsidised household is as likely to be trapped as the uninsured one.
 *
 * # Safety
 * `model` must be live; `value` and `out_verdict` must be valid.
 */
enum PtStatus pt_optimal_theta(const struct PtModel *model,
                               double kappa,
                               double theta,
                               enum PtPremiumMapping premium_mapping,
                               double x,
                               double *value,
                               enum PtVerdict *out_verdict);

/**
 * Barrier `B*` at which the barrier scheme matches the uninsured trapping probability.
 * `b_max` NaN selects the default search range.
 *
 * # Safety
 * Handles must be live; `opts` may be NULL; `value` and `out_verdict` must be valid.
 */
enum PtStatus pt_optimal_barrier(const struct PtModel *model,
                                 const struct PtScheme *scheme,
                                 double x,
                                 double b_max,
                                 const struct PtOptions *opts,
                                 double *value,
                                 enum PtVerdict *out_verdict);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POVERTY_TRAP_H */
