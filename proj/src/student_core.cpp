#include "student_core.hpp"

#include <algorithm>
#include <cmath>

#include "accum.hpp"
#include "errors.hpp"

namespace facimean {

namespace {

bool all_equal(std::span<const double> xs) noexcept {
  for (double x : xs) {
    if (x != xs.front()) return false;
  }
  return true;
}

// Prefix sums with clamping so the cumulative sequence of nonnegative weights
// is nondecreasing even after compensation rounding.
std::vector<double> nondecreasing_prefix(std::span<const double> weights) {
  std::vector<double> cum(weights.size() + 1);
  cum[0] = 0.0;
  CompensatedSum acc;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc.add(weights[i]);
    cum[i + 1] = std::max(acc.value(), cum[i]);
  }
  return cum;
}

std::vector<double> squared_residuals(std::span<const double> sample, double center) {
  std::vector<double> w(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double d = sample[i] - center;
    w[i] = d * d;
  }
  return w;
}

// Denominator of the Student statistic: sqrt(sum (Z_i - Zbar)^2 / (n-1)).
double student_scale(std::span<const double> sample) {
  require_studentizable(sample);
  const double q = centered_sum_squares(sample);
  if (!(q > 0.0)) {
    raise(ErrorCode::DegenerateSample, "centered sum of squares is zero");
  }
  return std::sqrt(q / static_cast<double>(sample.size() - 1));
}

std::vector<double> studentized_partial_sums(std::span<const double> sample) {
  const double scale = student_scale(sample) * std::sqrt(static_cast<double>(sample.size()));
  std::vector<double> v(sample.size() + 1);
  v[0] = 0.0;
  CompensatedSum acc;
  for (std::size_t k = 0; k < sample.size(); ++k) {
    acc.add(sample[k]);
    v[k + 1] = acc.value() / scale;
  }
  return v;
}

StepProcess process_with_values(std::span<const double> sample, const TimeFunctionKind& kind,
                                std::vector<double> values) {
  const std::vector<double> cum = cumulative_weights(sample, kind);
  const double total = cum.back();
  if (!(total > 0.0)) {
    raise(ErrorCode::DegenerateWeights, "cumulative weights sum to zero");
  }
  StepProcess process;
  process.breakpoints.resize(cum.size());
  for (std::size_t k = 0; k < cum.size(); ++k) {
    process.breakpoints[k] = std::min(cum[k] / total, 1.0);
  }
  process.breakpoints.front() = 0.0;
  process.breakpoints.back() = 1.0;
  process.values = std::move(values);
  return process;
}

}  // namespace

void require_studentizable(std::span<const double> sample) {
  if (sample.size() < 2) {
    raise(ErrorCode::TooFewObservations, "need at least 2 observations");
  }
  if (all_equal(sample)) {
    raise(ErrorCode::DegenerateSample, "all observations are equal");
  }
}

VarianceProfile VarianceProfile::from_variances(std::vector<double> sigma2) {
  for (double s2 : sigma2) {
    if (!(s2 > 0.0)) {
      raise(ErrorCode::InvalidArgument, "variance profile entries must be positive");
    }
  }
  VarianceProfile profile;
  profile.cumulative.resize(sigma2.size() + 1);
  profile.cumulative[0] = 0.0;
  CompensatedSum acc;
  for (std::size_t i = 0; i < sigma2.size(); ++i) {
    acc.add(sigma2[i]);
    profile.cumulative[i + 1] = std::max(acc.value(), profile.cumulative[i]);
  }
  profile.sigma2 = std::move(sigma2);
  return profile;
}

double StepProcess::value_at(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) {
    raise(ErrorCode::DomainError, "step process evaluated outside [0,1]");
  }
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
  const std::size_t idx = static_cast<std::size_t>(it - breakpoints.begin()) - 1;
  return values[idx];
}

double sample_mean(std::span<const double> sample) {
  if (sample.empty()) {
    raise(ErrorCode::TooFewObservations, "empty sample");
  }
  return compensated_total(sample) / static_cast<double>(sample.size());
}

double centered_sum_squares(std::span<const double> sample) {
  const double mean = sample_mean(sample);
  CompensatedSum acc;
  for (double z : sample) {
    const double d = z - mean;
    acc.add(d * d);
  }
  return acc.value();
}

double student_statistic(std::span<const double> sample) {
  const double scale = student_scale(sample);
  const double total = compensated_total(sample);
  return total / std::sqrt(static_cast<double>(sample.size())) / scale;
}

double self_normalized_sum(std::span<const double> sample) {
  if (sample.empty()) {
    raise(ErrorCode::TooFewObservations, "empty sample");
  }
  CompensatedSum squares;
  for (double z : sample) squares.add(z * z);
  const double ss = squares.value();
  if (!(ss > 0.0)) {
    raise(ErrorCode::DegenerateSample, "all observations are zero");
  }
  return compensated_total(sample) / std::sqrt(ss);
}

std::vector<double> cumulative_weights(std::span<const double> sample,
                                       const TimeFunctionKind& kind) {
  return std::visit(
      [&](const auto& k) -> std::vector<double> {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, OracleVariance>) {
          if (k.profile.sigma2.size() != sample.size()) {
            raise(ErrorCode::InvalidArgument, "variance profile length differs from sample length");
          }
          return k.profile.cumulative;
        } else if constexpr (std::is_same_v<T, RawSquares>) {
          return nondecreasing_prefix(squared_residuals(sample, k.center));
        } else {
          return nondecreasing_prefix(squared_residuals(sample, sample_mean(sample)));
        }
      },
      kind);
}

std::size_t time_function(const TimeFunctionKind& kind, std::span<const double> sample, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    raise(ErrorCode::DomainError, "time function requires t in [0,1]");
  }
  const std::vector<double> cum = cumulative_weights(sample, kind);
  const double total = cum.back();
  if (!(total > 0.0)) {
    raise(ErrorCode::DegenerateWeights, "cumulative weights sum to zero");
  }
  const double threshold = t * total;
  auto it = std::upper_bound(cum.begin(), cum.end(), threshold);
  return static_cast<std::size_t>(it - cum.begin()) - 1;
}

StepProcess student_process(std::span<const double> sample, const TimeFunctionKind& kind) {
  return process_with_values(sample, kind, studentized_partial_sums(sample));
}

StepProcess self_normalized_process(std::span<const double> sample, const TimeFunctionKind& kind) {
  if (sample.size() < 2) {
    raise(ErrorCode::TooFewObservations, "need at least 2 observations");
  }
  CompensatedSum squares;
  for (double z : sample) squares.add(z * z);
  const double root_ss = std::sqrt(squares.value());
  if (!(root_ss > 0.0)) {
    raise(ErrorCode::DegenerateSample, "all observations are zero");
  }
  std::vector<double> v(sample.size() + 1);
  v[0] = 0.0;
  CompensatedSum acc;
  for (std::size_t k = 0; k < sample.size(); ++k) {
    acc.add(sample[k]);
    v[k + 1] = acc.value() / root_ss;
  }
  return process_with_values(sample, kind, std::move(v));
}

double sup_abs_functional(const StepProcess& process) {
  const std::size_t n = process.segment_count();
  double result = std::abs(process.values[n]);
  for (std::size_t k = 0; k < n; ++k) {
    if (process.breakpoints[k + 1] > process.breakpoints[k]) {
      result = std::max(result, std::abs(process.values[k]));
    }
  }
  return result;
}

double integral_functional(const StepProcess& process) {
  CompensatedSum acc;
  for (std::size_t k = 0; k + 1 < process.breakpoints.size(); ++k) {
    acc.add((process.breakpoints[k + 1] - process.breakpoints[k]) * process.values[k]);
  }
  return acc.value();
}

double endpoint_functional(const StepProcess& process, std::span<const double> sample,
                           const TimeFunctionKind& kind, double t0) {
  if (!(t0 > 0.0 && t0 <= 1.0)) {
    raise(ErrorCode::DomainError, "endpoint functional requires t0 in (0,1]");
  }
  return process.values[time_function(kind, sample, t0)];
}

double max_ratio_diagnostic(std::span<const double> sample, std::optional<double> known_center) {
  if (sample.empty()) {
    raise(ErrorCode::TooFewObservations, "empty sample");
  }
  const double center = known_center ? *known_center : sample_mean(sample);
  CompensatedSum acc;
  double largest = 0.0;
  for (double z : sample) {
    const double sq = (z - center) * (z - center);
    acc.add(sq);
    largest = std::max(largest, sq);
  }
  const double total = acc.value();
  if (!(total > 0.0)) {
    // about the sample mean this can only happen for an all-equal sample
    if (!known_center) {
      raise(ErrorCode::DegenerateSample, "all observations are equal");
    }
    raise(ErrorCode::DegenerateWeights, "sum of squared residuals about the center is zero");
  }
  return largest / total;
}

std::vector<double> nu_weights(std::span<const double> sample) {
  require_studentizable(sample);
  const double mean = sample_mean(sample);
  const std::vector<double> squares = squared_residuals(sample, mean);
  const double total = compensated_total(squares);
  if (!(total > 0.0)) {
    raise(ErrorCode::DegenerateSample, "centered sum of squares is zero");
  }
  std::vector<double> nu(squares.size());
  for (std::size_t k = 0; k < squares.size(); ++k) {
    nu[k] = squares[k] / total;
  }
  return nu;
}

}  // namespace facimean
