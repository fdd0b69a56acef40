/*
 * facimean — confidence intervals for a common mean of independent
 * observations, built from functionals of Student step processes, plus a
 * deterministic Monte Carlo harness for coverage / fit / discrepancy studies.
 *
 * C API. All functions return fm_status; FM_OK is 0. On failure,
 * fm_last_error_message() returns a thread-local description of what went
 * wrong. Handles returned through out-parameters are owned by the caller and
 * released with the matching *_free function.
 */
#ifndef FACIMEAN_H
#define FACIMEAN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FM_API __declspec(dllexport)
#else
#define FM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fm_status {
  FM_OK = 0,
  FM_ERR_TOO_FEW_OBSERVATIONS = 1,
  FM_ERR_DEGENERATE_SAMPLE = 2,
  FM_ERR_DEGENERATE_WEIGHTS = 3,
  FM_ERR_DEGENERATE_WEIGHTED_CENTER = 4,
  FM_ERR_ZERO_TIME_INDEX = 5,
  FM_ERR_DOMAIN = 6,
  FM_ERR_UNSUPPORTED_DESIGN = 7,
  FM_ERR_CONFIG = 8,
  FM_ERR_IO = 9,
  FM_ERR_INVALID_ARGUMENT = 10,
  FM_ERR_INTERNAL = 11
} fm_status;

FM_API const char* fm_status_name(fm_status status);

/* Thread-local message describing the most recent failure on this thread. */
FM_API const char* fm_last_error_message(void);

FM_API const char* fm_version(void);

/* ------------------------------------------------------------------ */
/* Sample statistics                                                    */

FM_API fm_status fm_student_statistic(const double* data, size_t n, double* out);
FM_API fm_status fm_self_normalized_sum(const double* data, size_t n, double* out);

/* sum_i (Z_i - mean)^2 */
FM_API fm_status fm_centered_sum_squares(const double* data, size_t n, double* out);

/* max_i (Z_i - c)^2 / sum_i (Z_i - c)^2; c is the sample mean unless
 * use_known_center is nonzero, in which case c = center. */
FM_API fm_status fm_max_ratio(const double* data, size_t n, int use_known_center, double center,
                              double* out);

/* ------------------------------------------------------------------ */
/* Confidence intervals                                                 */

typedef enum fm_method {
  FM_METHOD_SUP = 0,
  FM_METHOD_T0 = 1,
  FM_METHOD_INTEGRAL = 2
} fm_method;

typedef struct fm_interval {
  double lower;
  double upper;
  double level; /* 1 - alpha */
  fm_method method;
  double t0;  /* meaningful for FM_METHOD_T0 */
  int empty;  /* nonzero when the sup intersection came out empty */
} fm_interval;

FM_API fm_status fm_ci_sup(const double* data, size_t n, double alpha, fm_interval* out);
FM_API fm_status fm_ci_t0(const double* data, size_t n, double t0, double alpha, fm_interval* out);
FM_API fm_status fm_ci_integral(const double* data, size_t n, double alpha, fm_interval* out);

/* ------------------------------------------------------------------ */
/* Limit-law quantiles                                                  */

/* a with P(sup_{0<=t<=1} |W(t)| > a) = alpha, W a standard Wiener process */
FM_API fm_status fm_quantile_sup_abs(double alpha, double* out);
/* z_{alpha/2} * sqrt(t0) */
FM_API fm_status fm_quantile_endpoint(double t0, double alpha, double* out);
/* z_{alpha/2} / sqrt(3) */
FM_API fm_status fm_quantile_integral(double alpha, double* out);
/* Phi^{-1}(p) */
FM_API fm_status fm_normal_quantile(double p, double* out);

/* ------------------------------------------------------------------ */
/* Student step processes (opaque handle)                               */

typedef struct fm_process fm_process;

typedef enum fm_time_function {
  FM_TIME_ORACLE = 0,   /* cumulative true variances (sigma2 array; NULL = all ones) */
  FM_TIME_RAW = 1,      /* cumulative (Z_i - mu)^2 about the known center mu */
  FM_TIME_CENTERED = 2  /* cumulative (Z_i - mean)^2 about the sample mean */
} fm_time_function;

/* Builds the Studentized partial-sum step process of the data under the given
 * time function. sigma2 (length n) is read only for FM_TIME_ORACLE; mu only
 * for FM_TIME_RAW. */
FM_API fm_status fm_process_build(const double* data, size_t n, fm_time_function kind, double mu,
                                  const double* sigma2, fm_process** out);
FM_API void fm_process_free(fm_process* process);

/* Number of (breakpoint, value) points: sample size + 1. */
FM_API size_t fm_process_point_count(const fm_process* process);
/* Copies breakpoints and values into caller arrays of point-count length. */
FM_API fm_status fm_process_copy(const fm_process* process, double* breakpoints, double* values);
FM_API fm_status fm_process_value_at(const fm_process* process, double t, double* out);
FM_API fm_status fm_process_sup_abs(const fm_process* process, double* out);
FM_API fm_status fm_process_integral(const fm_process* process, double* out);

/* ------------------------------------------------------------------ */
/* Simulation experiments (opaque handle)                               */

typedef struct fm_simulation fm_simulation;

/* Parses and validates a JSON config (schema_version 1). Errors name the
 * offending field. */
FM_API fm_status fm_simulation_create(const char* config_json, fm_simulation** out);
FM_API void fm_simulation_free(fm_simulation* simulation);

/* experiment is one of "coverage", "fit", "discrepancy". threads <= 0 uses
 * all hardware threads; the thread count never changes the results. */
FM_API fm_status fm_simulation_run(fm_simulation* simulation, const char* experiment, int threads);

/* Valid after a successful run. The report JSON omits wall time so that
 * reruns with the same seed are byte-identical. */
FM_API const char* fm_simulation_report_json(const fm_simulation* simulation);
FM_API const char* fm_simulation_summary(const fm_simulation* simulation);
FM_API fm_status fm_simulation_write_report(const fm_simulation* simulation, const char* path);

/* Writes the sample of one replication (regenerated from the seed) as plain
 * text, one value per line. */
FM_API fm_status fm_simulation_write_sample(const fm_simulation* simulation, uint64_t replication,
                                            const char* path);

#ifdef __cplusplus
}
#endif

#endif /* FACIMEAN_H */
