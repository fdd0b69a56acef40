// facimean — command-line front end over the facimean C API.
//
// Subcommands: ci, quantile, diagnose, simulate, path. Outputs are
// line-oriented key=value records; --json switches ci/quantile/diagnose to a
// structured document. Exit codes: 0 success, 2 usage/parse, 3
// domain/degenerate, 4 I/O.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "facimean/facimean.h"

namespace {

struct CliFailure {
  int exit_code;
  std::string message;
};

int exit_code_for(fm_status status) {
  switch (status) {
    case FM_OK: return 0;
    case FM_ERR_CONFIG:
    case FM_ERR_INVALID_ARGUMENT: return 2;
    case FM_ERR_IO: return 4;
    case FM_ERR_INTERNAL: return 1;
    default: return 3;
  }
}

void check(fm_status status) {
  if (status != FM_OK) {
    // library messages already carry the typed error name
    throw CliFailure{exit_code_for(status), fm_last_error_message()};
  }
}

// One numeric literal per line; lines whose first non-blank character is '#'
// and blank lines are ignored. Parse failures report the line number.
std::vector<double> read_data_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw CliFailure{4, "cannot open '" + path + "' for reading"};
  }
  std::vector<double> values;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) continue;
    if (line[start] == '#') continue;
    const char* begin = line.c_str() + start;
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    if (end == begin) {
      throw CliFailure{2, path + ": parse error at line " + std::to_string(line_number)};
    }
    while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
    if (*end != '\0') {
      throw CliFailure{2, path + ": trailing characters at line " + std::to_string(line_number)};
    }
    values.push_back(value);
  }
  if (values.empty()) {
    throw CliFailure{2, path + ": no data values found"};
  }
  return values;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw CliFailure{4, "cannot open '" + path + "' for reading"};
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

const char* method_tag(fm_method method) {
  switch (method) {
    case FM_METHOD_SUP: return "sup";
    case FM_METHOD_T0: return "t0";
    case FM_METHOD_INTEGRAL: return "integral";
  }
  return "unknown";
}

int run_ci(const std::string& data_path, const std::string& method, double alpha, double t0,
           bool has_t0, bool as_json) {
  const std::vector<double> data = read_data_file(data_path);
  fm_interval ci;
  if (method == "sup") {
    check(fm_ci_sup(data.data(), data.size(), alpha, &ci));
  } else if (method == "t0") {
    if (!has_t0) throw CliFailure{2, "--t0 is required for method 't0'"};
    check(fm_ci_t0(data.data(), data.size(), t0, alpha, &ci));
  } else {
    check(fm_ci_integral(data.data(), data.size(), alpha, &ci));
  }
  double max_ratio = 0.0;
  check(fm_max_ratio(data.data(), data.size(), 0, 0.0, &max_ratio));

  if (as_json) {
    nlohmann::json j;
    j["method"] = method_tag(ci.method);
    if (ci.method == FM_METHOD_T0) j["t0"] = ci.t0;
    j["alpha"] = alpha;
    j["level"] = ci.level;
    j["lower"] = ci.lower;
    j["upper"] = ci.upper;
    j["empty"] = ci.empty != 0;
    j["n"] = data.size();
    j["max_ratio"] = max_ratio;
    std::cout << j.dump() << '\n';
  } else {
    std::printf("method=%s alpha=%g", method_tag(ci.method), alpha);
    if (ci.method == FM_METHOD_T0) std::printf(" t0=%g", ci.t0);
    std::printf(" lower=%.6f upper=%.6f empty=%s n=%zu max_ratio=%.6f\n", ci.lower, ci.upper,
                ci.empty ? "true" : "false", data.size(), max_ratio);
  }
  return 0;
}

int run_quantile(const std::string& kind, double alpha, double t0, bool has_t0, bool as_json) {
  double value = 0.0;
  if (kind == "sup") {
    check(fm_quantile_sup_abs(alpha, &value));
  } else if (kind == "endpoint") {
    if (!has_t0) throw CliFailure{2, "--t0 is required for kind 'endpoint'"};
    check(fm_quantile_endpoint(t0, alpha, &value));
  } else {
    check(fm_quantile_integral(alpha, &value));
  }
  if (as_json) {
    nlohmann::json j;
    j["kind"] = kind;
    j["alpha"] = alpha;
    if (kind == "endpoint") j["t0"] = t0;
    j["quantile"] = value;
    std::cout << j.dump() << '\n';
  } else {
    std::printf("%.6f\n", value);
  }
  return 0;
}

int run_diagnose(const std::string& data_path, bool as_json) {
  const std::vector<double> data = read_data_file(data_path);
  double centered_ss = 0.0;
  check(fm_centered_sum_squares(data.data(), data.size(), &centered_ss));
  double max_ratio = 0.0;
  check(fm_max_ratio(data.data(), data.size(), 0, 0.0, &max_ratio));

  // Heuristic flag only; the interval constructions stay valid either way.
  const bool warn = max_ratio > 0.05;
  if (as_json) {
    nlohmann::json j;
    j["n"] = data.size();
    j["max_ratio"] = max_ratio;
    j["centered_sum_squares"] = centered_ss;
    j["warning"] = warn;
    std::cout << j.dump() << '\n';
  } else {
    std::printf("n=%zu max_ratio=%.6f centered_sum_squares=%.6f\n", data.size(), max_ratio,
                centered_ss);
    if (warn) {
      std::printf("WARNING: max-ratio diagnostic exceeds 0.05; a single observation dominates "
                  "the squared residuals\n");
    }
  }
  return 0;
}

int run_simulate(const std::string& config_path, const std::string& experiment,
                 const std::string& out_path, int threads, const std::string& dump_sample_path) {
  const std::string config_text = read_text_file(config_path);
  fm_simulation* sim = nullptr;
  check(fm_simulation_create(config_text.c_str(), &sim));
  struct Guard {
    fm_simulation* sim;
    ~Guard() { fm_simulation_free(sim); }
  } guard{sim};

  check(fm_simulation_run(sim, experiment.c_str(), threads));
  check(fm_simulation_write_report(sim, out_path.c_str()));
  if (!dump_sample_path.empty()) {
    check(fm_simulation_write_sample(sim, 0, dump_sample_path.c_str()));
  }
  const char* summary = fm_simulation_summary(sim);
  std::printf("%s out=%s\n", summary != nullptr ? summary : "", out_path.c_str());
  return 0;
}

int run_path(const std::string& data_path, const std::string& kind, double mu,
             const std::string& sigma2_path, const std::string& out_path) {
  const std::vector<double> data = read_data_file(data_path);

  fm_time_function tf = FM_TIME_CENTERED;
  std::vector<double> sigma2;
  const double* sigma2_ptr = nullptr;
  if (kind == "oracle") {
    tf = FM_TIME_ORACLE;
    if (!sigma2_path.empty()) {
      sigma2 = read_data_file(sigma2_path);
      if (sigma2.size() != data.size()) {
        throw CliFailure{2, "--sigma2 file must hold one variance per observation"};
      }
      sigma2_ptr = sigma2.data();
    }
  } else if (kind == "raw") {
    tf = FM_TIME_RAW;
  }

  fm_process* process = nullptr;
  check(fm_process_build(data.data(), data.size(), tf, mu, sigma2_ptr, &process));
  struct Guard {
    fm_process* process;
    ~Guard() { fm_process_free(process); }
  } guard{process};

  const std::size_t points = fm_process_point_count(process);
  std::vector<double> breakpoints(points);
  std::vector<double> values(points);
  check(fm_process_copy(process, breakpoints.data(), values.data()));

  std::ofstream out(out_path);
  if (!out) {
    throw CliFailure{4, "cannot open '" + out_path + "' for writing"};
  }
  char buf[96];
  for (std::size_t k = 0; k < points; ++k) {
    std::snprintf(buf, sizeof(buf), "%.12g %.12g\n", breakpoints[k], values[k]);
    out << buf;
  }
  if (!out) {
    throw CliFailure{4, "write to '" + out_path + "' failed"};
  }
  std::printf("points=%zu out=%s\n", points, out_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Confidence intervals for a common mean from Student-process functionals"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "structured JSON output instead of key=value lines");

  std::string data_path, method, kind, config_path, out_path, sigma2_path, dump_sample_path;
  double alpha = 0.05;
  double t0 = 1.0;
  double mu = 0.0;
  int threads = 0;

  CLI::App* ci = app.add_subcommand("ci", "confidence interval for the common mean from a data file");
  ci->add_option("--data", data_path, "data file, one value per line")->required();
  ci->add_option("--method", method, "sup, t0 or integral")
      ->required()
      ->check(CLI::IsMember({"sup", "t0", "integral"}));
  ci->add_option("--alpha", alpha, "significance level in (0,1)")->required();
  CLI::Option* ci_t0 = ci->add_option("--t0", t0, "time point in (0,1], method t0 only");

  CLI::App* quantile = app.add_subcommand("quantile", "limit-law critical value");
  quantile->add_option("--kind", kind, "sup, endpoint or integral")
      ->required()
      ->check(CLI::IsMember({"sup", "endpoint", "integral"}));
  quantile->add_option("--alpha", alpha, "significance level in (0,1)")->required();
  CLI::Option* quantile_t0 = quantile->add_option("--t0", t0, "time point, kind endpoint only");

  CLI::App* diagnose = app.add_subcommand("diagnose", "max-ratio diagnostic for a data file");
  diagnose->add_option("--data", data_path, "data file, one value per line")->required();

  CLI::App* simulate = app.add_subcommand("simulate", "run a Monte Carlo experiment from a config");
  simulate->add_option("--config", config_path, "JSON config file")->required();
  simulate->add_option("--experiment", method, "coverage, fit or discrepancy")
      ->required()
      ->check(CLI::IsMember({"coverage", "fit", "discrepancy"}));
  simulate->add_option("--out", out_path, "report file to write")->required();
  simulate->add_option("--threads", threads, "worker threads (default: all cores; never affects results)");
  simulate->add_option("--dump-sample", dump_sample_path,
                       "also write the first replication's sample to this file");

  CLI::App* path = app.add_subcommand("path", "dump a Student process as two-column text");
  path->add_option("--data", data_path, "data file, one value per line")->required();
  path->add_option("--kind", kind, "oracle, centered or raw")
      ->required()
      ->check(CLI::IsMember({"oracle", "centered", "raw"}));
  path->add_option("--mu", mu, "known center for kind 'raw' (default 0)");
  path->add_option("--sigma2", sigma2_path,
                   "variance file for kind 'oracle' (default: equal variances)");
  path->add_option("--out", out_path, "output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (ci->parsed()) {
      return run_ci(data_path, method, alpha, t0, ci_t0->count() > 0, as_json);
    }
    if (quantile->parsed()) {
      return run_quantile(kind, alpha, t0, quantile_t0->count() > 0, as_json);
    }
    if (diagnose->parsed()) {
      return run_diagnose(data_path, as_json);
    }
    if (simulate->parsed()) {
      return run_simulate(config_path, method, out_path, threads, dump_sample_path);
    }
    if (path->parsed()) {
      return run_path(data_path, kind, mu, sigma2_path, out_path);
    }
  } catch (const CliFailure& failure) {
    std::fprintf(stderr, "error: %s\n", failure.message.c_str());
    return failure.exit_code;
  }
  return 0;
}
