#include "wiener.hpp"

#include <cmath>
#include <limits>

#include "errors.hpp"

namespace facimean {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kSqrt2Pi = 2.50662827463100050242;

// Acklam's rational approximation to the inverse normal CDF,
// |relative error| < 1.15e-9 over (0,1).
double inverse_normal_raw(double p) noexcept {
  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / kSqrt2); }

double normal_pdf(double x) noexcept { return std::exp(-0.5 * x * x) / kSqrt2Pi; }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    raise(ErrorCode::DomainError, "normal_quantile requires p in (0,1)");
  }
  double x = inverse_normal_raw(p);
  // One Halley step against the erfc-based CDF. exp(x^2/2) overflows only for
  // p within ~1e-310 of the boundary, where the raw approximation stands.
  const double e = normal_cdf(x) - p;
  const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
  if (std::isfinite(u)) {
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

double standard_normal_draw(RngStream& rng) noexcept {
  return inverse_normal_raw(rng.uniform01());
}

double sup_abs_wiener_cdf(double a) {
  if (!(a > 0.0)) {
    raise(ErrorCode::DomainError, "sup_abs_wiener_cdf requires a > 0");
  }
  if (a >= 10.0) {
    return 1.0;  // P(sup|W| > 10) < 1e-21, below the resolution of 1.0
  }
  const double base = kPi * kPi / (8.0 * a * a);
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 0;; ++k) {
    const double m = 2.0 * k + 1.0;
    const double term = std::exp(-base * m * m) / m;
    if (term < 1e-16) break;
    sum += sign * term;
    sign = -sign;
  }
  const double p = (4.0 / kPi) * sum;
  return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p);
}

double sup_abs_wiener_quantile(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    raise(ErrorCode::DomainError, "sup_abs_wiener_quantile requires alpha in (0,1)");
  }
  const double target = 1.0 - alpha;
  double lo = 1e-3;
  double hi = 4.0;
  while (sup_abs_wiener_cdf(hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) raise(ErrorCode::DomainError, "sup_abs_wiener_quantile bracket failure");
  }
  while (hi - lo > 1e-11) {
    const double mid = 0.5 * (lo + hi);
    if (sup_abs_wiener_cdf(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double functional_limit_quantile(const FunctionalKind& kind, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    raise(ErrorCode::DomainError, "functional_limit_quantile requires alpha in (0,1)");
  }
  return std::visit(
      [alpha](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, SupAbs>) {
          return sup_abs_wiener_quantile(alpha);
        } else if constexpr (std::is_same_v<T, Endpoint>) {
          if (!(k.t0 > 0.0 && k.t0 <= 1.0)) {
            raise(ErrorCode::DomainError, "Endpoint requires t0 in (0,1]");
          }
          return normal_quantile(1.0 - alpha / 2.0) * std::sqrt(k.t0);
        } else {
          return normal_quantile(1.0 - alpha / 2.0) / std::sqrt(3.0);
        }
      },
      kind);
}

double functional_limit_cdf(const FunctionalKind& kind, double x) {
  return std::visit(
      [x](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, SupAbs>) {
          return x <= 0.0 ? 0.0 : sup_abs_wiener_cdf(x);
        } else if constexpr (std::is_same_v<T, Endpoint>) {
          if (!(k.t0 > 0.0 && k.t0 <= 1.0)) {
            raise(ErrorCode::DomainError, "Endpoint requires t0 in (0,1]");
          }
          return normal_cdf(x / std::sqrt(k.t0));
        } else {
          return normal_cdf(x * std::sqrt(3.0));
        }
      },
      kind);
}

void simulate_wiener_path(std::size_t grid_size, RngStream& rng, WienerPath& out) {
  if (grid_size < 1) {
    raise(ErrorCode::DomainError, "simulate_wiener_path requires grid_size >= 1");
  }
  out.values.resize(grid_size + 1);
  out.values[0] = 0.0;
  const double step_sd = 1.0 / std::sqrt(static_cast<double>(grid_size));
  double w = 0.0;
  for (std::size_t j = 1; j <= grid_size; ++j) {
    w += step_sd * standard_normal_draw(rng);
    out.values[j] = w;
  }
}

WienerPath simulate_wiener_path(std::size_t grid_size, RngStream& rng) {
  WienerPath path;
  simulate_wiener_path(grid_size, rng, path);
  return path;
}

}  // namespace facimean
