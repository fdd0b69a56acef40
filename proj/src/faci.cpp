#include "faci.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <tuple>

#include "accum.hpp"
#include "errors.hpp"

namespace facimean {

namespace {

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    raise(ErrorCode::DomainError, "alpha must lie in (0,1)");
  }
}

// H = q * sqrt(n * sum(Z_i - Zbar)^2 / (n-1))
double half_width(std::span<const double> sample, double quantile) {
  require_studentizable(sample);
  const double q = centered_sum_squares(sample);
  if (!(q > 0.0)) {
    raise(ErrorCode::DegenerateSample, "centered sum of squares is zero");
  }
  const double n = static_cast<double>(sample.size());
  return quantile * std::sqrt(n * q / (n - 1.0));
}

std::vector<double> partial_sums(std::span<const double> sample) {
  std::vector<double> s(sample.size());
  CompensatedSum acc;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    acc.add(sample[i]);
    s[i] = acc.value();
  }
  return s;
}

}  // namespace

const char* interval_method_name(IntervalMethod method) noexcept {
  switch (method) {
    case IntervalMethod::SupIntersection: return "sup";
    case IntervalMethod::FixedT0: return "t0";
    case IntervalMethod::IntegralWeighted: return "integral";
  }
  return "unknown";
}

double cached_limit_quantile(const FunctionalKind& kind, double alpha) {
  using Key = std::tuple<int, std::uint64_t, std::uint64_t>;
  static std::mutex mutex;
  static std::map<Key, double> cache;

  double t0 = 0.0;
  if (const auto* ep = std::get_if<Endpoint>(&kind)) t0 = ep->t0;
  const Key key{static_cast<int>(kind.index()), std::bit_cast<std::uint64_t>(t0),
                std::bit_cast<std::uint64_t>(alpha)};
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const double value = functional_limit_quantile(kind, alpha);
  std::lock_guard<std::mutex> lock(mutex);
  return cache.emplace(key, value).first->second;
}

ConfidenceInterval faci_sup(std::span<const double> sample, double alpha) {
  require_alpha(alpha);
  const double a = cached_limit_quantile(SupAbs{}, alpha);
  const double h = half_width(sample, a);
  const std::vector<double> sums = partial_sums(sample);

  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= sums.size(); ++k) {
    const double denom = static_cast<double>(k);
    lower = std::max(lower, (sums[k - 1] - h) / denom);
    upper = std::min(upper, (sums[k - 1] + h) / denom);
  }

  ConfidenceInterval ci;
  ci.method = IntervalMethod::SupIntersection;
  ci.level = 1.0 - alpha;
  ci.lower = lower;
  ci.upper = upper;
  ci.empty = lower > upper;
  return ci;
}

ConfidenceInterval faci_t0(std::span<const double> sample, double t0, double alpha) {
  require_alpha(alpha);
  if (!(t0 > 0.0 && t0 <= 1.0)) {
    raise(ErrorCode::DomainError, "t0 must lie in (0,1]");
  }
  require_studentizable(sample);
  const std::size_t k = time_function(CenteredSquares{}, sample, t0);
  if (k == 0) {
    raise(ErrorCode::ZeroTimeIndex, "time-function index at t0 is zero; enlarge t0 or n");
  }
  const double q = cached_limit_quantile(Endpoint{t0}, alpha);
  const double h = half_width(sample, q);
  const std::vector<double> sums = partial_sums(sample);
  const double s_k = sums[k - 1];
  const double denom = static_cast<double>(k);

  ConfidenceInterval ci;
  ci.method = IntervalMethod::FixedT0;
  ci.t0 = t0;
  ci.level = 1.0 - alpha;
  ci.lower = (s_k - h) / denom;
  ci.upper = (s_k + h) / denom;
  ci.empty = false;
  return ci;
}

ConfidenceInterval faci_integral(std::span<const double> sample, double alpha) {
  require_alpha(alpha);
  const std::vector<double> nu = nu_weights(sample);
  const double q = cached_limit_quantile(Integral{}, alpha);
  const double h = half_width(sample, q);
  const std::vector<double> sums = partial_sums(sample);

  CompensatedSum center_acc;
  CompensatedSum denom_acc;
  for (std::size_t k = 1; k + 1 <= sums.size(); ++k) {
    center_acc.add(nu[k] * sums[k - 1]);
    denom_acc.add(nu[k] * static_cast<double>(k));
  }
  const double denom = denom_acc.value();
  if (!(denom > 0.0)) {
    raise(ErrorCode::DegenerateWeightedCenter, "weighted index total is zero");
  }
  const double center = center_acc.value();

  ConfidenceInterval ci;
  ci.method = IntervalMethod::IntegralWeighted;
  ci.level = 1.0 - alpha;
  ci.lower = (center - h) / denom;
  ci.upper = (center + h) / denom;
  ci.empty = false;
  return ci;
}

}  // namespace facimean
