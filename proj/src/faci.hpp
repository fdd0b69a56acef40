#pragma once

#include <span>

#include "student_core.hpp"
#include "wiener.hpp"

namespace facimean {

enum class IntervalMethod { SupIntersection, FixedT0, IntegralWeighted };

const char* interval_method_name(IntervalMethod method) noexcept;

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.0;  // 1 - alpha
  IntervalMethod method = IntervalMethod::SupIntersection;
  double t0 = 1.0;  // meaningful for FixedT0 only
  bool empty = false;
};

// Intersection over k = 1..n of [(S_k - H)/k, (S_k + H)/k] with
// H = a * sqrt(n * sum(Z_i - Zbar)^2 / (n-1)) and a the upper-alpha point of
// sup|W|. An empty intersection is reported via the empty flag, not an error.
ConfidenceInterval faci_sup(std::span<const double> sample, double alpha);

// [(S_K -+ H)/K] with K the mean-centered-squares time-function index of t0
// and H = z_{alpha/2} sqrt(t0) * sqrt(n * sum(Z_i - Zbar)^2 / (n-1)).
// Raises ZeroTimeIndex when K = 0.
ConfidenceInterval faci_t0(std::span<const double> sample, double t0, double alpha);

// [(C -+ H)/D] with C = sum_{k=1}^{n-1} nu_{k+1} S_k, D = sum_{k=1}^{n-1}
// nu_{k+1} k and H = (z_{alpha/2}/sqrt(3)) * sqrt(n * sum(Z_i - Zbar)^2 / (n-1)).
ConfidenceInterval faci_integral(std::span<const double> sample, double alpha);

// functional_limit_quantile memoized per (kind, t0, alpha); thread-safe with
// idempotent fill. The sup quantile's root search is the only nontrivial cost
// and repeats across Monte Carlo replications.
double cached_limit_quantile(const FunctionalKind& kind, double alpha);

}  // namespace facimean
