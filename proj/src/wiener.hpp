#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "rng.hpp"

namespace facimean {

// Standard normal CDF and density.
double normal_cdf(double x) noexcept;
double normal_pdf(double x) noexcept;

// Phi^{-1}(p) for p in (0,1). Rational initial guess polished with one Halley
// step against the erfc-based CDF; absolute error well below 1e-10.
double normal_quantile(double p);

// Fast inverse-CDF normal draw for samplers. Skips the polishing step (the
// raw approximation is already accurate to ~1e-9, far below Monte Carlo
// resolution) to keep large path simulations cheap.
double standard_normal_draw(RngStream& rng) noexcept;

// P(sup_{0<=t<=1} |W(t)| <= a) via the classical alternating series
//   (4/pi) sum_{k>=0} (-1)^k (2k+1)^{-1} exp(-pi^2 (2k+1)^2 / (8 a^2)).
// Truncated when a term drops below 1e-16; the error is bounded by the first
// omitted term.
double sup_abs_wiener_cdf(double a);

// The constant a with P(sup_{0<=t<=1} |W(t)| > a) = alpha, found by bracketing
// bisection on the series CDF to absolute tolerance 1e-10.
double sup_abs_wiener_quantile(double alpha);

struct SupAbs {};
struct Endpoint {
  double t0 = 1.0;
};
struct Integral {};
using FunctionalKind = std::variant<SupAbs, Endpoint, Integral>;

// Upper-alpha critical value of the functional's limit law:
//   SupAbs      -> a with P(sup|W| > a) = alpha
//   Endpoint    -> z_{alpha/2} * sqrt(t0)        (N(0, t0) limit)
//   Integral    -> z_{alpha/2} / sqrt(3)         (N(0, 1/3) limit)
double functional_limit_quantile(const FunctionalKind& kind, double alpha);

// CDF of the functional's limit law, used as the reference in KS fits.
double functional_limit_cdf(const FunctionalKind& kind, double x);

struct WienerPath {
  std::vector<double> values;  // W(j/m) for j = 0..m, values[0] = 0
};

// Discretized Wiener path from independent N(0, 1/m) increments. Used as the
// Monte Carlo oracle for the sup|W| law.
void simulate_wiener_path(std::size_t grid_size, RngStream& rng, WienerPath& out);
WienerPath simulate_wiener_path(std::size_t grid_size, RngStream& rng);

}  // namespace facimean
