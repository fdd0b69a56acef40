// Unit tests for the sample-level statistics: Student and self-normalized
// statistics, the three time functions, step-process construction, path
// functionals and diagnostics. Hand-computed expected values are frozen in;
// invariants run over seeded random samples.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"
#include "student_core.hpp"
#include "wiener.hpp"

using Catch::Approx;
using namespace facimean;

namespace {

std::vector<double> random_sample(RngStream& rng, std::size_t n) {
  std::vector<double> z(n);
  for (double& v : z) v = standard_normal_draw(rng);
  return z;
}

}  // namespace

TEST_CASE("student_statistic: frozen values", "[student]") {
  CHECK(student_statistic(std::vector<double>{-1.0, 1.0}) == Approx(0.0).margin(1e-15));
  // (6 / sqrt(3)) / 1 = 2 sqrt(3)
  CHECK(student_statistic(std::vector<double>{1.0, 2.0, 3.0}) ==
        Approx(3.4641016151377544).epsilon(1e-12));
}

TEST_CASE("student_statistic: zero-mean samples give zero", "[student]") {
  RngStream rng(11, 0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> z = random_sample(rng, 8);
    const double mean = sample_mean(z);
    for (double& v : z) v -= mean;
    CHECK(std::abs(student_statistic(z)) < 1e-12);
  }
}

TEST_CASE("student_statistic: error paths", "[student][errors]") {
  CHECK_THROWS_AS(student_statistic(std::vector<double>{1.0}), Error);
  try {
    student_statistic(std::vector<double>{1.0});
    FAIL("expected TooFewObservations");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewObservations);
  }
  try {
    student_statistic(std::vector<double>{2.0, 2.0, 2.0});
    FAIL("expected DegenerateSample");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateSample);
  }
}

TEST_CASE("self_normalized_sum: frozen values", "[student]") {
  CHECK(self_normalized_sum(std::vector<double>{-1.0, 1.0}) == Approx(0.0).margin(1e-15));
  CHECK(self_normalized_sum(std::vector<double>{1.0, 2.0, 3.0}) ==
        Approx(6.0 / std::sqrt(14.0)).epsilon(1e-14));
  CHECK(self_normalized_sum(std::vector<double>{3.0, 4.0}) == Approx(1.4).epsilon(1e-14));
  try {
    self_normalized_sum(std::vector<double>{0.0, 0.0});
    FAIL("expected DegenerateSample");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateSample);
  }
}

TEST_CASE("time_function: oracle variance profile", "[time_function]") {
  const std::vector<double> z{0.3, -0.7};  // values are irrelevant for this kind
  const TimeFunctionKind kind = OracleVariance{VarianceProfile::from_variances({1.0, 3.0})};
  // cumulative (0, 1, 4); 1 <= 0.25 * 4
  CHECK(time_function(kind, z, 0.25) == 1);
  CHECK(time_function(kind, z, 0.2499) == 0);
  CHECK(time_function(kind, z, 0.0) == 0);
  CHECK(time_function(kind, z, 1.0) == 2);
}

TEST_CASE("time_function: centered squares of (1,2,3)", "[time_function]") {
  const std::vector<double> z{1.0, 2.0, 3.0};
  const TimeFunctionKind kind = CenteredSquares{};
  // centered squares (1, 0, 1), cumulative (0, 1, 1, 2)
  CHECK(time_function(kind, z, 0.5) == 2);
  CHECK(time_function(kind, z, 0.49) == 0);
  CHECK(time_function(kind, z, 1.0) == 3);
  CHECK(time_function(kind, z, 0.0) == 0);
}

TEST_CASE("time_function: nondecreasing in t, endpoints pinned", "[time_function]") {
  RngStream rng(17, 3);
  for (int rep = 0; rep < 10; ++rep) {
    const std::vector<double> z = random_sample(rng, 12);
    const TimeFunctionKind kind = CenteredSquares{};
    std::size_t prev = 0;
    for (int i = 0; i <= 64; ++i) {
      const double t = static_cast<double>(i) / 64.0;
      const std::size_t k = time_function(kind, z, t);
      CHECK(k >= prev);
      prev = k;
    }
    CHECK(time_function(kind, z, 0.0) == 0);  // first weight positive a.s.
    CHECK(time_function(kind, z, 1.0) == z.size());
  }
}

TEST_CASE("time_function: degenerate weights raise", "[time_function][errors]") {
  const std::vector<double> z{5.0, 5.0};
  try {
    time_function(CenteredSquares{}, z, 0.5);
    FAIL("expected DegenerateWeights");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateWeights);
  }
}

TEST_CASE("student_process: (1,2,3) with centered squares", "[process]") {
  const std::vector<double> z{1.0, 2.0, 3.0};
  const StepProcess p = student_process(z, CenteredSquares{});
  REQUIRE(p.breakpoints.size() == 4);
  REQUIRE(p.values.size() == 4);
  CHECK(p.breakpoints[0] == 0.0);
  CHECK(p.breakpoints[1] == Approx(0.5).epsilon(1e-15));
  CHECK(p.breakpoints[2] == Approx(0.5).epsilon(1e-15));
  CHECK(p.breakpoints[3] == 1.0);
  CHECK(p.values[0] == 0.0);
  CHECK(p.values[1] == Approx(0.5773502691896258).epsilon(1e-12));
  CHECK(p.values[2] == Approx(1.7320508075688772).epsilon(1e-12));
  CHECK(p.values[3] == Approx(3.4641016151377544).epsilon(1e-12));
}

TEST_CASE("student_process: value at t=1 is the Student statistic", "[process]") {
  RngStream rng(29, 7);
  for (int rep = 0; rep < 10; ++rep) {
    const std::vector<double> z = random_sample(rng, 15);
    const StepProcess p = student_process(z, CenteredSquares{});
    CHECK(p.values.front() == 0.0);
    CHECK(p.value_at(1.0) == Approx(student_statistic(z)).epsilon(1e-13));
  }
}

TEST_CASE("self_normalized_process: frozen values and zero prefix", "[process]") {
  const std::vector<double> z{1.0, 2.0, 3.0};
  const StepProcess p = self_normalized_process(z, CenteredSquares{});
  const double root14 = std::sqrt(14.0);
  CHECK(p.values[0] == 0.0);
  CHECK(p.values[1] == Approx(1.0 / root14).epsilon(1e-13));
  CHECK(p.values[2] == Approx(3.0 / root14).epsilon(1e-13));
  CHECK(p.values[3] == Approx(6.0 / root14).epsilon(1e-13));
  CHECK(p.value_at(1.0) == Approx(self_normalized_sum(z)).epsilon(1e-13));

  const std::vector<double> zeros_first{0.0, 0.0, 1.0, -1.0};
  const StepProcess q = self_normalized_process(zeros_first, RawSquares{0.0});
  CHECK(q.values[1] == 0.0);
  CHECK(q.values[2] == 0.0);
}

TEST_CASE("sup_abs_functional: skips zero-width segments", "[functional]") {
  const std::vector<double> z{1.0, 2.0, 3.0};
  const StepProcess p = student_process(z, CenteredSquares{});
  // 0.577... sits on the zero-width segment and is never attained
  CHECK(sup_abs_functional(p) == Approx(3.4641016151377544).epsilon(1e-12));

  StepProcess flat;
  flat.breakpoints = {0.0, 0.5, 1.0};
  flat.values = {0.0, 0.0, 0.0};
  CHECK(sup_abs_functional(flat) == 0.0);
}

TEST_CASE("sup_abs_functional: dominates the endpoint value", "[functional]") {
  RngStream rng(31, 1);
  for (int rep = 0; rep < 20; ++rep) {
    const std::vector<double> z = random_sample(rng, 10);
    const StepProcess p = student_process(z, CenteredSquares{});
    CHECK(sup_abs_functional(p) >= std::abs(p.values.back()) - 1e-15);
  }
}

TEST_CASE("integral_functional: frozen value and constant path", "[functional]") {
  const std::vector<double> z{1.0, 2.0, 3.0};
  const StepProcess p = student_process(z, CenteredSquares{});
  CHECK(integral_functional(p) == Approx(0.8660254037844386).epsilon(1e-12));

  StepProcess constant;
  constant.breakpoints = {0.0, 1.0};
  constant.values = {2.5, 2.5};
  // single segment carrying v_0
  CHECK(integral_functional(constant) == Approx(2.5).epsilon(1e-15));
}

TEST_CASE("integral_functional: matches the nu-weighted representation", "[functional]") {
  RngStream rng(37, 5);
  for (int rep = 0; rep < 200; ++rep) {
    const std::vector<double> z = random_sample(rng, 4 + rep % 20);
    const StepProcess p = student_process(z, CenteredSquares{});
    const std::vector<double> nu = nu_weights(z);

    const double n = static_cast<double>(z.size());
    const double scale = std::sqrt(n) * std::sqrt(centered_sum_squares(z) / (n - 1.0));
    double weighted = 0.0;
    double s = 0.0;
    double vmax = 0.0;
    for (std::size_t k = 1; k + 1 <= z.size(); ++k) {
      s += z[k - 1];
      weighted += nu[k] * (s / scale);
      vmax = std::max(vmax, std::abs(s / scale));
    }
    const double direct = integral_functional(p);
    CHECK(std::abs(direct - weighted) <= 1e-12 * std::max(1.0, vmax));
  }
}

TEST_CASE("integral_functional: agrees with midpoint evaluation of the path", "[functional]") {
  RngStream rng(41, 2);
  for (int rep = 0; rep < 50; ++rep) {
    const std::vector<double> z = random_sample(rng, 8);
    const StepProcess p = student_process(z, CenteredSquares{});
    double midpoint = 0.0;
    for (std::size_t k = 0; k + 1 < p.breakpoints.size(); ++k) {
      const double width = p.breakpoints[k + 1] - p.breakpoints[k];
      if (width > 0.0) {
        midpoint += width * p.value_at(0.5 * (p.breakpoints[k] + p.breakpoints[k + 1]));
      }
    }
    CHECK(integral_functional(p) == Approx(midpoint).margin(1e-12));
  }
}

TEST_CASE("endpoint_functional: frozen values", "[functional]") {
  const std::vector<double> z{1.0, 2.0, 3.0};
  const StepProcess p = student_process(z, CenteredSquares{});
  CHECK(endpoint_functional(p, z, CenteredSquares{}, 1.0) ==
        Approx(student_statistic(z)).epsilon(1e-13));
  CHECK(endpoint_functional(p, z, CenteredSquares{}, 0.5) ==
        Approx(1.7320508075688772).epsilon(1e-12));
  CHECK(endpoint_functional(p, z, CenteredSquares{}, 0.49) == 0.0);
}

TEST_CASE("max_ratio_diagnostic: frozen values", "[diagnostic]") {
  CHECK(max_ratio_diagnostic(std::vector<double>{1.0, -1.0, 1.0, -1.0}, 0.0) ==
        Approx(0.25).epsilon(1e-15));
  CHECK(max_ratio_diagnostic(std::vector<double>{0.0, 0.0, 0.0, 10.0}) ==
        Approx(0.75).epsilon(1e-13));
  // one dominant observation
  const double near_one =
      max_ratio_diagnostic(std::vector<double>{5.0, 5.0, 5.0, 5.0, 5.0, 5.0 + 1e4});
  CHECK(near_one > 0.8);
  try {
    max_ratio_diagnostic(std::vector<double>{3.0, 3.0});
    FAIL("expected DegenerateSample");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateSample);
  }
  try {
    max_ratio_diagnostic(std::vector<double>{3.0, 3.0}, 3.0);
    FAIL("expected DegenerateWeights");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateWeights);
  }
}

TEST_CASE("nu_weights: frozen values and simplex property", "[diagnostic]") {
  const std::vector<double> nu = nu_weights(std::vector<double>{1.0, 2.0, 3.0});
  REQUIRE(nu.size() == 3);
  CHECK(nu[0] == Approx(0.5).epsilon(1e-14));
  CHECK(nu[1] == Approx(0.0).margin(1e-15));
  CHECK(nu[2] == Approx(0.5).epsilon(1e-14));

  const std::vector<double> pair = nu_weights(std::vector<double>{-2.0, 7.0});
  CHECK(pair[0] == Approx(0.5).epsilon(1e-14));
  CHECK(pair[1] == Approx(0.5).epsilon(1e-14));

  RngStream rng(43, 9);
  for (int rep = 0; rep < 20; ++rep) {
    const std::vector<double> z = random_sample(rng, 10);
    const std::vector<double> w = nu_weights(z);
    double total = 0.0;
    for (double v : w) {
      CHECK(v >= 0.0);
      total += v;
    }
    CHECK(total == Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("identity: Student process equals rescaled self-normalized process", "[identity]") {
  RngStream rng(47, 4);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + rep % 30;
    const std::vector<double> z = random_sample(rng, n);
    const StepProcess student = student_process(z, CenteredSquares{});
    const StepProcess selfnorm = self_normalized_process(z, CenteredSquares{});
    const double vn = self_normalized_sum(z);
    const double nn = static_cast<double>(n);
    CHECK(nn - vn * vn > 0.0);
    // stable form of (n - V_n^2): n * sum(Z_i - Zbar)^2 / sum Z_i^2
    double sum_squares = 0.0;
    for (double v : z) sum_squares += v * v;
    const double factor = std::sqrt(nn * centered_sum_squares(z) / (sum_squares * (nn - 1.0)));
    for (int i = 0; i <= 16; ++i) {
      const double t = static_cast<double>(i) / 16.0;
      const double lhs = student.value_at(t);
      const double rhs = selfnorm.value_at(t) / factor;
      CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max({1.0, std::abs(lhs), std::abs(rhs)}));
    }
  }
}

TEST_CASE("affine invariance of centered-squares machinery", "[invariance]") {
  RngStream rng(53, 8);
  for (int rep = 0; rep < 30; ++rep) {
    const std::vector<double> z = random_sample(rng, 9);
    const double a = 0.25 + 3.0 * rng.uniform01();
    const double b = 4.0 * (rng.uniform01() - 0.5);
    std::vector<double> mapped(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) mapped[i] = a * z[i] + b;

    for (int i = 0; i <= 8; ++i) {
      const double t = static_cast<double>(i) / 8.0;
      CHECK(time_function(CenteredSquares{}, z, t) == time_function(CenteredSquares{}, mapped, t));
    }
    const std::vector<double> nu_z = nu_weights(z);
    const std::vector<double> nu_m = nu_weights(mapped);
    for (std::size_t i = 0; i < nu_z.size(); ++i) {
      CHECK(nu_m[i] == Approx(nu_z[i]).margin(1e-12));
    }
    CHECK(max_ratio_diagnostic(mapped) == Approx(max_ratio_diagnostic(z)).margin(1e-12));
  }
}

TEST_CASE("positive scaling leaves the centered Student statistic unchanged", "[invariance]") {
  RngStream rng(59, 6);
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<double> z = random_sample(rng, 7);
    const double mean = sample_mean(z);
    for (double& v : z) v -= mean;
    const double a = 0.1 + 5.0 * rng.uniform01();
    std::vector<double> scaled(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) scaled[i] = a * z[i];
    CHECK(student_statistic(scaled) == Approx(student_statistic(z)).margin(1e-11));
  }
}

TEST_CASE("variance profile validation", "[profile]") {
  CHECK_THROWS_AS(VarianceProfile::from_variances({1.0, 0.0}), Error);
  const VarianceProfile p = VarianceProfile::from_variances({0.5, 1.5, 2.0});
  REQUIRE(p.cumulative.size() == 4);
  CHECK(p.cumulative[0] == 0.0);
  CHECK(p.cumulative[3] == Approx(4.0).epsilon(1e-15));
  const std::vector<double> z{9.0, 9.0};
  CHECK_THROWS_AS(time_function(TimeFunctionKind(OracleVariance{p}), z, 0.5), Error);
}
