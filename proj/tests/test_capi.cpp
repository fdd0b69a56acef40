// Exercises the shared-library C API surface: value functions, error codes
// with thread-local messages, the opaque process and simulation handles, and
// report writing.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "facimean/facimean.h"

using Catch::Approx;

namespace {

const std::vector<double> kOneTwoThree{1.0, 2.0, 3.0};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string coverage_config(int replications, unsigned seed) {
  std::ostringstream out;
  out << R"({"schema_version":1,"design":{"kind":"iid_normal","mu":1.0,"sigma":1.0},)"
      << R"("n":64,"replications":)" << replications << R"(,"alpha":0.1,"seed":)" << seed
      << R"(,"methods":[{"method":"sup"},{"method":"t0","t0":1.0},{"method":"integral"}]})";
  return out.str();
}

}  // namespace

TEST_CASE("statistics through the C API", "[capi]") {
  double value = 0.0;
  REQUIRE(fm_student_statistic(kOneTwoThree.data(), kOneTwoThree.size(), &value) == FM_OK);
  CHECK(value == Approx(3.4641016151377544).epsilon(1e-12));
  REQUIRE(fm_self_normalized_sum(kOneTwoThree.data(), kOneTwoThree.size(), &value) == FM_OK);
  CHECK(value == Approx(6.0 / std::sqrt(14.0)).epsilon(1e-12));
  REQUIRE(fm_centered_sum_squares(kOneTwoThree.data(), kOneTwoThree.size(), &value) == FM_OK);
  CHECK(value == Approx(2.0).epsilon(1e-14));

  const std::vector<double> alternating{1.0, -1.0, 1.0, -1.0};
  REQUIRE(fm_max_ratio(alternating.data(), alternating.size(), 1, 0.0, &value) == FM_OK);
  CHECK(value == Approx(0.25).epsilon(1e-14));
}

TEST_CASE("error codes and messages", "[capi]") {
  double value = 0.0;
  const std::vector<double> single{1.0};
  CHECK(fm_student_statistic(single.data(), 1, &value) == FM_ERR_TOO_FEW_OBSERVATIONS);
  CHECK(std::string(fm_last_error_message()).find("2 observations") != std::string::npos);

  const std::vector<double> constant{4.0, 4.0, 4.0};
  CHECK(fm_student_statistic(constant.data(), constant.size(), &value) ==
        FM_ERR_DEGENERATE_SAMPLE);

  fm_interval ci;
  CHECK(fm_ci_t0(kOneTwoThree.data(), kOneTwoThree.size(), 0.49, 0.05, &ci) ==
        FM_ERR_ZERO_TIME_INDEX);
  CHECK(fm_quantile_sup_abs(1.5, &value) == FM_ERR_DOMAIN);
  CHECK(fm_student_statistic(nullptr, 3, &value) == FM_ERR_INVALID_ARGUMENT);
  CHECK(std::string(fm_status_name(FM_ERR_DOMAIN)) == "FM_ERR_DOMAIN");
}

TEST_CASE("intervals through the C API", "[capi]") {
  fm_interval ci;
  const std::vector<double> pm{-1.0, 1.0};
  REQUIRE(fm_ci_sup(pm.data(), pm.size(), 0.05, &ci) == FM_OK);
  CHECK(ci.lower == Approx(-2.2414).margin(1e-3));
  CHECK(ci.upper == Approx(2.2414).margin(1e-3));
  CHECK(ci.empty == 0);
  CHECK(ci.method == FM_METHOD_SUP);

  REQUIRE(fm_ci_t0(kOneTwoThree.data(), kOneTwoThree.size(), 0.5, 0.05, &ci) == FM_OK);
  CHECK(ci.lower == Approx(0.29978).margin(1e-4));
  CHECK(ci.upper == Approx(2.70022).margin(1e-4));
  CHECK(ci.t0 == 0.5);

  REQUIRE(fm_ci_integral(kOneTwoThree.data(), kOneTwoThree.size(), 0.05, &ci) == FM_OK);
  CHECK(ci.lower == Approx(-0.45996).margin(1e-4));
  CHECK(ci.upper == Approx(3.45996).margin(1e-4));
}

TEST_CASE("quantiles through the C API", "[capi]") {
  double value = 0.0;
  REQUIRE(fm_quantile_endpoint(1.0, 0.05, &value) == FM_OK);
  CHECK(value == Approx(1.959964).margin(1e-6));
  REQUIRE(fm_quantile_integral(0.05, &value) == FM_OK);
  CHECK(value == Approx(1.1315857340).margin(1e-9));
  REQUIRE(fm_quantile_sup_abs(0.05, &value) == FM_OK);
  CHECK(value == Approx(2.2414).margin(1e-3));
  REQUIRE(fm_normal_quantile(0.975, &value) == FM_OK);
  CHECK(value == Approx(1.959964).margin(1e-6));
}

TEST_CASE("process handle lifecycle", "[capi]") {
  fm_process* process = nullptr;
  REQUIRE(fm_process_build(kOneTwoThree.data(), kOneTwoThree.size(), FM_TIME_CENTERED, 0.0,
                           nullptr, &process) == FM_OK);
  REQUIRE(process != nullptr);
  REQUIRE(fm_process_point_count(process) == 4);

  std::vector<double> breakpoints(4), values(4);
  REQUIRE(fm_process_copy(process, breakpoints.data(), values.data()) == FM_OK);
  CHECK(breakpoints[1] == Approx(0.5).epsilon(1e-15));
  CHECK(values[3] == Approx(3.4641016151377544).epsilon(1e-12));

  double out = 0.0;
  REQUIRE(fm_process_sup_abs(process, &out) == FM_OK);
  CHECK(out == Approx(3.4641016151377544).epsilon(1e-12));
  REQUIRE(fm_process_integral(process, &out) == FM_OK);
  CHECK(out == Approx(0.8660254037844386).epsilon(1e-12));
  REQUIRE(fm_process_value_at(process, 0.5, &out) == FM_OK);
  CHECK(out == Approx(1.7320508075688772).epsilon(1e-12));
  fm_process_free(process);

  // oracle kind with default equal variances
  fm_process* uniform_kind = nullptr;
  REQUIRE(fm_process_build(kOneTwoThree.data(), kOneTwoThree.size(), FM_TIME_ORACLE, 0.0, nullptr,
                           &uniform_kind) == FM_OK);
  std::vector<double> bp(4), vals(4);
  REQUIRE(fm_process_copy(uniform_kind, bp.data(), vals.data()) == FM_OK);
  CHECK(bp[1] == Approx(1.0 / 3.0).epsilon(1e-14));
  fm_process_free(uniform_kind);

  fm_process* bad = nullptr;
  const std::vector<double> constant{2.0, 2.0};
  CHECK(fm_process_build(constant.data(), constant.size(), FM_TIME_CENTERED, 0.0, nullptr, &bad) ==
        FM_ERR_DEGENERATE_SAMPLE);
  CHECK(bad == nullptr);
}

TEST_CASE("simulation handle: config errors name the field", "[capi]") {
  fm_simulation* sim = nullptr;
  CHECK(fm_simulation_create("{ not json", &sim) == FM_ERR_CONFIG);
  CHECK(sim == nullptr);

  const std::string missing_seed =
      R"({"schema_version":1,"design":{"kind":"iid_normal","mu":0.0,"sigma":1.0},)"
      R"("n":16,"replications":4,"alpha":0.1,)"
      R"("methods":[{"method":"sup"}]})";
  CHECK(fm_simulation_create(missing_seed.c_str(), &sim) == FM_ERR_CONFIG);
  CHECK(std::string(fm_last_error_message()).find("seed") != std::string::npos);
}

TEST_CASE("simulation handle: run, report, summary, dump", "[capi]") {
  const std::string config = coverage_config(200, 7);
  fm_simulation* sim = nullptr;
  REQUIRE(fm_simulation_create(config.c_str(), &sim) == FM_OK);
  CHECK(fm_simulation_report_json(sim) == nullptr);

  CHECK(fm_simulation_run(sim, "bogus", 1) == FM_ERR_INVALID_ARGUMENT);
  REQUIRE(fm_simulation_run(sim, "coverage", 2) == FM_OK);
  REQUIRE(fm_simulation_report_json(sim) != nullptr);
  const std::string report = fm_simulation_report_json(sim);
  CHECK(report.find("\"experiment\": \"coverage\"") != std::string::npos);
  REQUIRE(fm_simulation_summary(sim) != nullptr);
  CHECK(std::string(fm_simulation_summary(sim)).find("coverage=") != std::string::npos);

  const std::string report_path = "capi_report_test.json";
  REQUIRE(fm_simulation_write_report(sim, report_path.c_str()) == FM_OK);
  CHECK(slurp(report_path) == report);

  const std::string sample_path = "capi_sample_test.txt";
  REQUIRE(fm_simulation_write_sample(sim, 0, sample_path.c_str()) == FM_OK);
  std::ifstream in(sample_path);
  std::size_t lines = 0;
  std::string line;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 64);

  fm_simulation_free(sim);
  std::remove(report_path.c_str());
  std::remove(sample_path.c_str());
}

TEST_CASE("simulation handle: reruns are byte-identical", "[capi]") {
  const std::string config = coverage_config(300, 11);
  std::string first, second;
  for (std::string* out : {&first, &second}) {
    fm_simulation* sim = nullptr;
    REQUIRE(fm_simulation_create(config.c_str(), &sim) == FM_OK);
    REQUIRE(fm_simulation_run(sim, "coverage", out == &first ? 1 : 8) == FM_OK);
    *out = fm_simulation_report_json(sim);
    fm_simulation_free(sim);
  }
  CHECK(first == second);
}
