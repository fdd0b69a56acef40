#include "simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

#include "accum.hpp"
#include "errors.hpp"

namespace facimean {

namespace {

constexpr double kPi = 3.14159265358979323846;

template <class F>
double adaptive_simpson_rec(const F& f, double a, double fa, double b, double fb, double m,
                            double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol) {
  if (!(b > a)) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, 40);
}

// Student-t density with nu degrees of freedom.
double t_density(double x, double nu) {
  const double log_norm =
      std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) - 0.5 * std::log(nu * kPi);
  return std::exp(log_norm - 0.5 * (nu + 1.0) * std::log1p(x * x / nu));
}

// E[T^2 1{|T| >= c}] for T ~ t_nu, nu > 2, via quadrature of the tail in log
// space. The integrand x^2 f(x) decays like x^{1-nu}, so an upper cutoff with
// a power-law remainder bound below 1e-15 is cheap to find.
double t_tail_second_moment(double c, double nu) {
  const double total = nu / (nu - 2.0);
  if (!(c > 0.0)) return total;
  const double log_norm =
      std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) - 0.5 * std::log(nu * kPi);
  // x^3 f(x) <= A nu^{(nu+1)/2} x^{2-nu}; remainder past X is that over (nu-2).
  // The cutoff is capped: for nu barely above 2 the power blows up, and the
  // log-space integrand then decays slowly but is still captured to ~1e-3.
  const double bound_const = std::exp(log_norm + 0.5 * (nu + 1.0) * std::log(nu)) / (nu - 2.0);
  const double x_hi = std::min(
      1e300, std::max(2.0 * c, std::pow(bound_const / 1e-15, 1.0 / (nu - 2.0))));
  const auto integrand = [nu](double y) {
    const double x = std::exp(y);
    return x * x * x * t_density(x, nu);  // x^2 f(x) dx = x^3 f(x) dy
  };
  const double tail = adaptive_simpson(integrand, std::log(c), std::log(x_hi), 1e-12);
  return std::min(total, 2.0 * tail);
}

// E[X^2 1{|X| >= c}] for X ~ N(0, sigma^2): sigma^2 * 2(k phi(k) + 1 - Phi(k)),
// k = c / sigma. The upper tail is taken from erfc directly; forming
// 1 - Phi(k) would absorb the k phi(k) term for large k.
double normal_tail_second_moment(double c, double sigma) {
  const double k = c / sigma;
  const double upper_tail = 0.5 * std::erfc(k / 1.4142135623730951);
  return sigma * sigma * 2.0 * (k * normal_pdf(k) + upper_tail);
}

// E[X^2 1{|X| >= c}] for X uniform on [-h, h].
double uniform_tail_second_moment(double c, double h) {
  if (c >= h) return 0.0;
  return (h * h * h - c * c * c) / (3.0 * h);
}

double student_t_draw(double df, RngStream& rng) {
  if (df == 1.0) {
    return std::tan(kPi * (rng.uniform01() - 0.5));
  }
  if (df == 2.0) {
    // Closed-form inverse CDF: F(x) = 1/2 + x / (2 sqrt(2 + x^2)).
    const double p = rng.uniform01() - 0.5;
    return 2.0 * p * std::sqrt(2.0 / (1.0 - 4.0 * p * p));
  }
  const double z = standard_normal_draw(rng);
  std::gamma_distribution<double> chi2(0.5 * df, 2.0);
  return z / std::sqrt(chi2(rng) / df);
}

void run_partitioned(std::size_t count, unsigned threads,
                     const std::function<void(std::size_t, std::size_t)>& body) {
  threads = std::max(1u, threads);
  if (threads == 1 || count < 2) {
    body(0, count);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = count * w / workers;
    const std::size_t end = count * (w + 1) / workers;
    pool.emplace_back([&, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

void validate_common(const SimulationConfig& config) {
  if (config.replications < 1) {
    raise(ErrorCode::ConfigError, "config field 'replications': must be >= 1");
  }
  if (config.n < 2) {
    raise(ErrorCode::ConfigError, "config field 'n': must be >= 2");
  }
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
    raise(ErrorCode::ConfigError, "config field 'alpha': must lie in (0,1)");
  }
}

std::optional<double> median_ignoring_nan(std::vector<double> values) {
  values.erase(std::remove_if(values.begin(), values.end(),
                              [](double v) { return std::isnan(v); }),
               values.end());
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

FunctionalKind method_limit_kind(const MethodSpec& spec) {
  switch (spec.method) {
    case IntervalMethod::SupIntersection: return SupAbs{};
    case IntervalMethod::FixedT0: return Endpoint{spec.t0};
    case IntervalMethod::IntegralWeighted: return Integral{};
  }
  return SupAbs{};
}

std::string reference_law_name(const FunctionalKind& kind) {
  return std::visit(
      [](const auto& k) -> std::string {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, SupAbs>) {
          return "sup_abs_wiener";
        } else if constexpr (std::is_same_v<T, Endpoint>) {
          char buf[64];
          std::snprintf(buf, sizeof(buf), "normal(0,%.17g)", k.t0);
          return buf;
        } else {
          return "normal(0,1/3)";
        }
      },
      kind);
}

std::uint64_t elapsed_ms(std::chrono::steady_clock::time_point start) {
  return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                        std::chrono::steady_clock::now() - start)
                                        .count());
}

}  // namespace

const char* design_kind_name(const Design& design) noexcept {
  return std::visit(
      [](const auto& d) -> const char* {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, IidNormal>) return "iid_normal";
        else if constexpr (std::is_same_v<T, HeteroNormal>) return "hetero_normal";
        else if constexpr (std::is_same_v<T, IidUniform>) return "iid_uniform";
        else if constexpr (std::is_same_v<T, SymmetricTwoPoint>) return "symmetric_two_point";
        else if constexpr (std::is_same_v<T, SymmetricT>) return "symmetric_t";
        else return "cauchy";
      },
      design);
}

double design_center(const Design& design) noexcept {
  return std::visit([](const auto& d) { return d.mu; }, design);
}

DesignTraits design_traits(const Design& design) noexcept {
  DesignTraits traits;
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, CauchyDesign>) {
          traits.negative_control = true;
        } else {
          traits.symmetric_ok = true;
          traits.lindeberg_ok = !std::is_same_v<T, SymmetricT>;
        }
      },
      design);
  return traits;
}

bool design_has_finite_variance(const Design& design) noexcept {
  return std::visit(
      [](const auto& d) -> bool {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, SymmetricT>) return d.degrees_of_freedom > 2.0;
        else if constexpr (std::is_same_v<T, CauchyDesign>) return false;
        else return true;
      },
      design);
}

double design_variance_at(const Design& design, std::size_t i) {
  if (!design_has_finite_variance(design)) {
    raise(ErrorCode::UnsupportedDesign, "design has no finite variance");
  }
  return std::visit(
      [i](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, IidNormal>) {
          return d.sigma * d.sigma;
        } else if constexpr (std::is_same_v<T, HeteroNormal>) {
          const double s = d.sigma_pattern[i % d.sigma_pattern.size()];
          return s * s;
        } else if constexpr (std::is_same_v<T, IidUniform>) {
          return d.half_width * d.half_width / 3.0;
        } else if constexpr (std::is_same_v<T, SymmetricTwoPoint>) {
          return d.magnitude * d.magnitude;
        } else if constexpr (std::is_same_v<T, SymmetricT>) {
          return d.degrees_of_freedom / (d.degrees_of_freedom - 2.0);
        } else {
          return 0.0;  // unreachable
        }
      },
      design);
}

std::vector<double> generate_sample(const Design& design, std::size_t n, RngStream& rng) {
  if (n < 1) {
    raise(ErrorCode::InvalidArgument, "sample size must be >= 1");
  }
  std::vector<double> z(n);
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, IidNormal>) {
          for (std::size_t i = 0; i < n; ++i) z[i] = d.mu + d.sigma * standard_normal_draw(rng);
        } else if constexpr (std::is_same_v<T, HeteroNormal>) {
          const std::size_t period = d.sigma_pattern.size();
          for (std::size_t i = 0; i < n; ++i) {
            z[i] = d.mu + d.sigma_pattern[i % period] * standard_normal_draw(rng);
          }
        } else if constexpr (std::is_same_v<T, IidUniform>) {
          for (std::size_t i = 0; i < n; ++i) {
            z[i] = d.mu + d.half_width * (2.0 * rng.uniform01() - 1.0);
          }
        } else if constexpr (std::is_same_v<T, SymmetricTwoPoint>) {
          for (std::size_t i = 0; i < n; ++i) {
            z[i] = rng.uniform01() < 0.5 ? d.mu - d.magnitude : d.mu + d.magnitude;
          }
        } else if constexpr (std::is_same_v<T, SymmetricT>) {
          for (std::size_t i = 0; i < n; ++i) {
            z[i] = d.mu + student_t_draw(d.degrees_of_freedom, rng);
          }
        } else {
          for (std::size_t i = 0; i < n; ++i) {
            z[i] = d.mu + d.scale * std::tan(kPi * (rng.uniform01() - 0.5));
          }
        }
      },
      design);
  return z;
}

double lindeberg_profile(const Design& design, std::size_t n, double epsilon) {
  if (!(epsilon > 0.0)) {
    raise(ErrorCode::DomainError, "epsilon must be positive");
  }
  if (!design_has_finite_variance(design)) {
    raise(ErrorCode::UnsupportedDesign, "Lindeberg profile requires finite variances");
  }
  CompensatedSum variance_total;
  for (std::size_t i = 0; i < n; ++i) variance_total.add(design_variance_at(design, i));
  const double s_n2 = variance_total.value();
  const double c = epsilon * std::sqrt(s_n2);

  CompensatedSum truncated;
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, IidNormal>) {
          truncated.add(static_cast<double>(n) * normal_tail_second_moment(c, d.sigma));
        } else if constexpr (std::is_same_v<T, HeteroNormal>) {
          for (std::size_t i = 0; i < n; ++i) {
            truncated.add(normal_tail_second_moment(c, d.sigma_pattern[i % d.sigma_pattern.size()]));
          }
        } else if constexpr (std::is_same_v<T, IidUniform>) {
          truncated.add(static_cast<double>(n) * uniform_tail_second_moment(c, d.half_width));
        } else if constexpr (std::is_same_v<T, SymmetricTwoPoint>) {
          truncated.add(c <= d.magnitude ? static_cast<double>(n) * d.magnitude * d.magnitude
                                         : 0.0);
        } else if constexpr (std::is_same_v<T, SymmetricT>) {
          truncated.add(static_cast<double>(n) *
                        t_tail_second_moment(c, d.degrees_of_freedom));
        }
      },
      design);
  return truncated.value() / s_n2;
}

double raikov_diagnostic(std::span<const double> sample, const VarianceProfile& profile) {
  if (sample.size() != profile.sigma2.size()) {
    raise(ErrorCode::InvalidArgument, "sample and variance profile lengths differ");
  }
  CompensatedSum squares;
  for (double z : sample) squares.add(z * z);
  return squares.value() / profile.cumulative.back();
}

double ks_distance(std::vector<double> values, const FunctionalKind& reference_kind) {
  if (values.empty()) {
    raise(ErrorCode::InvalidArgument, "KS distance of an empty sample");
  }
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = functional_limit_cdf(reference_kind, values[i]);
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - f);
    d = std::max(d, f - static_cast<double>(i) / n);
  }
  return d;
}

std::vector<double> replication_sample(const SimulationConfig& config, std::uint64_t replication) {
  RngStream rng(config.seed, replication);
  return generate_sample(config.design, config.n, rng);
}

unsigned default_thread_count() noexcept {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

CoverageReport coverage_experiment(const SimulationConfig& config, unsigned threads) {
  validate_common(config);
  if (config.methods.empty()) {
    raise(ErrorCode::ConfigError, "config field 'methods': must not be empty");
  }
  for (const MethodSpec& spec : config.methods) {
    // warm the quantile memo before the parallel phase
    cached_limit_quantile(method_limit_kind(spec), config.alpha);
  }

  const auto start = std::chrono::steady_clock::now();
  const double mu = design_center(config.design);
  const std::size_t reps = config.replications;
  const std::size_t n_methods = config.methods.size();

  enum class Outcome : std::uint8_t { Covered, NotCovered, Empty, Failed };
  std::vector<Outcome> outcomes(reps * n_methods, Outcome::Failed);
  std::vector<double> lengths(reps * n_methods, std::numeric_limits<double>::quiet_NaN());

  run_partitioned(reps, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      RngStream rng(config.seed, r);
      const std::vector<double> sample = generate_sample(config.design, config.n, rng);
      for (std::size_t m = 0; m < n_methods; ++m) {
        const MethodSpec& spec = config.methods[m];
        const std::size_t slot = r * n_methods + m;
        try {
          ConfidenceInterval ci;
          switch (spec.method) {
            case IntervalMethod::SupIntersection: ci = faci_sup(sample, config.alpha); break;
            case IntervalMethod::FixedT0: ci = faci_t0(sample, spec.t0, config.alpha); break;
            case IntervalMethod::IntegralWeighted: ci = faci_integral(sample, config.alpha); break;
          }
          if (ci.empty) {
            outcomes[slot] = Outcome::Empty;
          } else {
            outcomes[slot] =
                (ci.lower <= mu && mu <= ci.upper) ? Outcome::Covered : Outcome::NotCovered;
            lengths[slot] = ci.upper - ci.lower;
          }
        } catch (const Error&) {
          outcomes[slot] = Outcome::Failed;
        }
      }
    }
  });

  CoverageReport report;
  report.config = config;
  report.methods.resize(n_methods);
  for (std::size_t m = 0; m < n_methods; ++m) {
    MethodCoverage& agg = report.methods[m];
    agg.spec = config.methods[m];
    CompensatedSum length_sum;
    std::vector<double> method_lengths;
    method_lengths.reserve(reps);
    for (std::size_t r = 0; r < reps; ++r) {
      const std::size_t slot = r * n_methods + m;
      switch (outcomes[slot]) {
        case Outcome::Covered: ++agg.covered; break;
        case Outcome::NotCovered: ++agg.not_covered; break;
        case Outcome::Empty: ++agg.empty_count; break;
        case Outcome::Failed: ++agg.error_count; break;
      }
      if (!std::isnan(lengths[slot])) {
        length_sum.add(lengths[slot]);
        method_lengths.push_back(lengths[slot]);
      }
    }
    agg.coverage = static_cast<double>(agg.covered) / static_cast<double>(reps);
    if (!method_lengths.empty()) {
      agg.mean_length = length_sum.value() / static_cast<double>(method_lengths.size());
      agg.median_length = median_ignoring_nan(std::move(method_lengths));
    }
  }
  report.duration_ms = elapsed_ms(start);
  return report;
}

FitReport fclt_fit_experiment(const SimulationConfig& config, unsigned threads) {
  validate_common(config);
  if (config.kinds.empty()) {
    raise(ErrorCode::ConfigError, "config field 'kinds': must not be empty");
  }

  const auto start = std::chrono::steady_clock::now();
  const double mu = design_center(config.design);
  const std::size_t reps = config.replications;
  const std::size_t n_kinds = config.kinds.size();

  std::vector<double> values(reps * n_kinds, std::numeric_limits<double>::quiet_NaN());

  run_partitioned(reps, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> centered;
    for (std::size_t r = begin; r < end; ++r) {
      RngStream rng(config.seed, r);
      const std::vector<double> sample = generate_sample(config.design, config.n, rng);
      centered.resize(sample.size());
      for (std::size_t i = 0; i < sample.size(); ++i) centered[i] = sample[i] - mu;
      try {
        const StepProcess process = student_process(centered, CenteredSquares{});
        for (std::size_t k = 0; k < n_kinds; ++k) {
          values[r * n_kinds + k] = std::visit(
              [&](const auto& kind) -> double {
                using T = std::decay_t<decltype(kind)>;
                if constexpr (std::is_same_v<T, SupAbs>) {
                  return sup_abs_functional(process);
                } else if constexpr (std::is_same_v<T, Endpoint>) {
                  return endpoint_functional(process, centered, CenteredSquares{}, kind.t0);
                } else {
                  return integral_functional(process);
                }
              },
              config.kinds[k]);
        }
      } catch (const Error&) {
        // degenerate replication: all kinds stay NaN and are tallied as errors
      }
    }
  });

  FitReport report;
  report.config = config;
  report.kinds.resize(n_kinds);
  for (std::size_t k = 0; k < n_kinds; ++k) {
    KindFit& fit = report.kinds[k];
    fit.kind = config.kinds[k];
    fit.reference = reference_law_name(config.kinds[k]);
    std::vector<double> collected;
    collected.reserve(reps);
    for (std::size_t r = 0; r < reps; ++r) {
      const double v = values[r * n_kinds + k];
      if (std::isnan(v)) {
        ++fit.error_count;
      } else {
        collected.push_back(v);
      }
    }
    fit.sample_count = collected.size();
    fit.ks_distance = collected.empty() ? 1.0 : ks_distance(std::move(collected), config.kinds[k]);
  }
  report.duration_ms = elapsed_ms(start);
  return report;
}

DiscrepancyReport discrepancy_experiment(const SimulationConfig& config, unsigned threads) {
  if (config.replications < 1) {
    raise(ErrorCode::ConfigError, "config field 'replications': must be >= 1");
  }
  if (config.n_grid.empty()) {
    raise(ErrorCode::ConfigError, "config field 'n_grid': must not be empty");
  }
  if (!design_has_finite_variance(config.design)) {
    raise(ErrorCode::UnsupportedDesign, "discrepancy experiment requires finite known variances");
  }

  const auto start = std::chrono::steady_clock::now();
  const double mu = design_center(config.design);
  const std::size_t reps = config.replications;
  constexpr std::size_t kGridPoints = 1024;

  DiscrepancyReport report;
  report.config = config;
  for (std::size_t gi = 0; gi < config.n_grid.size(); ++gi) {
    const std::size_t n = config.n_grid[gi];
    if (n < 2) {
      raise(ErrorCode::ConfigError, "config field 'n_grid': entries must be >= 2");
    }
    std::vector<double> sigma2(n);
    for (std::size_t i = 0; i < n; ++i) sigma2[i] = design_variance_at(config.design, i);
    const TimeFunctionKind oracle_kind = OracleVariance{VarianceProfile::from_variances(sigma2)};

    std::vector<double> distances(reps, std::numeric_limits<double>::quiet_NaN());
    run_partitioned(reps, threads, [&](std::size_t begin, std::size_t end) {
      std::vector<double> centered;
      for (std::size_t r = begin; r < end; ++r) {
        RngStream rng(config.seed, (static_cast<std::uint64_t>(gi) << 48) | r);
        const std::vector<double> sample = generate_sample(config.design, n, rng);
        centered.resize(n);
        for (std::size_t i = 0; i < n; ++i) centered[i] = sample[i] - mu;
        try {
          const StepProcess with_oracle = student_process(centered, oracle_kind);
          const StepProcess with_centered = student_process(centered, CenteredSquares{});
          double d = 0.0;
          for (std::size_t j = 0; j < kGridPoints; ++j) {
            const double t = static_cast<double>(j) / static_cast<double>(kGridPoints - 1);
            d = std::max(d, std::abs(with_oracle.value_at(t) - with_centered.value_at(t)));
          }
          distances[r] = d;
        } catch (const Error&) {
          // degenerate replication skipped from the median
        }
      }
    });

    DiscrepancyPoint point;
    point.n = n;
    const std::optional<double> med = median_ignoring_nan(std::move(distances));
    point.median_sup_distance = med.value_or(std::numeric_limits<double>::quiet_NaN());
    report.points.push_back(point);
  }
  report.duration_ms = elapsed_ms(start);
  return report;
}

}  // namespace facimean
