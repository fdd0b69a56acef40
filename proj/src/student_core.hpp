#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace facimean {

// Per-observation variances sigma_i^2 with their running totals
// s_0^2 = 0, s_m^2 = sum_{i<=m} sigma_i^2.
struct VarianceProfile {
  std::vector<double> sigma2;
  std::vector<double> cumulative;  // length sigma2.size() + 1, strictly increasing

  static VarianceProfile from_variances(std::vector<double> sigma2);
};

// Weight choices for the time function, one per flavour of cumulative weight:
// true variances, squares about a known center, or squares about the sample
// mean.
struct OracleVariance {
  VarianceProfile profile;
};
struct RawSquares {
  double center = 0.0;
};
struct CenteredSquares {};
using TimeFunctionKind = std::variant<OracleVariance, RawSquares, CenteredSquares>;

// A realized Studentized path on [0,1]: value v_k holds on [c_k, c_{k+1}) and
// v_n is attained at t = 1. Zero-width segments carry values the path never
// attains.
struct StepProcess {
  std::vector<double> breakpoints;  // c_0 = 0 <= ... <= c_n = 1
  std::vector<double> values;       // v_0 = 0, ..., v_n

  std::size_t segment_count() const noexcept { return values.empty() ? 0 : values.size() - 1; }

  // Value at t in [0,1]: v_k for the largest k with c_k <= t.
  double value_at(double t) const;
};

// n >= 2 and not all equal; every Studentized operation divides by the
// centered sum of squares.
void require_studentizable(std::span<const double> sample);

double sample_mean(std::span<const double> sample);

// sum_i (Z_i - Zbar)^2, compensated.
double centered_sum_squares(std::span<const double> sample);

// (sum Z_i / sqrt(n)) / sqrt(sum (Z_i - Zbar)^2 / (n-1))
double student_statistic(std::span<const double> sample);

// sum Z_i / sqrt(sum Z_i^2)
double self_normalized_sum(std::span<const double> sample);

// Cumulative weights C_0 = 0, ..., C_n for the given kind (compensated and
// clamped nondecreasing).
std::vector<double> cumulative_weights(std::span<const double> sample, const TimeFunctionKind& kind);

// Largest m in {0,...,n} with C_m <= t * C_n. The comparison is performed on
// the weights themselves, never on ratios, so exact thresholds resolve the way
// the sup definition dictates.
std::size_t time_function(const TimeFunctionKind& kind, std::span<const double> sample, double t);

// Studentized partial-sum step process: breakpoints C_k / C_n, values
// (sum_{i<=k} Z_i / sqrt(n)) / sqrt(sum (Z_i - Zbar)^2 / (n-1)).
StepProcess student_process(std::span<const double> sample, const TimeFunctionKind& kind);

// Same breakpoints; values are partial sums over the full-sample root
// sum-of-squares sqrt(sum_{i=1}^n Z_i^2).
StepProcess self_normalized_process(std::span<const double> sample, const TimeFunctionKind& kind);

// sup over t in [0,1] of |path(t)|: the max of |v_k| over attained segments
// plus |v_n|.
double sup_abs_functional(const StepProcess& process);

// Exact integral of the step path over [0,1].
double integral_functional(const StepProcess& process);

// Path value at the time-function index of t0 in (0,1].
double endpoint_functional(const StepProcess& process, std::span<const double> sample,
                           const TimeFunctionKind& kind, double t0);

// max_i (Z_i - c)^2 / sum_i (Z_i - c)^2 with c the sample mean, or the known
// center when given.
double max_ratio_diagnostic(std::span<const double> sample,
                            std::optional<double> known_center = std::nullopt);

// nu_k = (Z_k - Zbar)^2 / sum_i (Z_i - Zbar)^2
std::vector<double> nu_weights(std::span<const double> sample);

}  // namespace facimean
