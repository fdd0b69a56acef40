#include "facimean/facimean.h"

#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "faci.hpp"
#include "report_json.hpp"
#include "simulation.hpp"
#include "student_core.hpp"
#include "wiener.hpp"

namespace {

thread_local std::string g_last_error;

fm_status status_from_code(facimean::ErrorCode code) {
  using facimean::ErrorCode;
  switch (code) {
    case ErrorCode::TooFewObservations: return FM_ERR_TOO_FEW_OBSERVATIONS;
    case ErrorCode::DegenerateSample: return FM_ERR_DEGENERATE_SAMPLE;
    case ErrorCode::DegenerateWeights: return FM_ERR_DEGENERATE_WEIGHTS;
    case ErrorCode::DegenerateWeightedCenter: return FM_ERR_DEGENERATE_WEIGHTED_CENTER;
    case ErrorCode::ZeroTimeIndex: return FM_ERR_ZERO_TIME_INDEX;
    case ErrorCode::DomainError: return FM_ERR_DOMAIN;
    case ErrorCode::UnsupportedDesign: return FM_ERR_UNSUPPORTED_DESIGN;
    case ErrorCode::ConfigError: return FM_ERR_CONFIG;
    case ErrorCode::IoError: return FM_ERR_IO;
    case ErrorCode::InvalidArgument: return FM_ERR_INVALID_ARGUMENT;
  }
  return FM_ERR_INTERNAL;
}

template <class Fn>
fm_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return FM_OK;
  } catch (const facimean::Error& e) {
    g_last_error = e.what();
    return status_from_code(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FM_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return FM_ERR_INTERNAL;
  }
}

fm_status invalid(const char* message) {
  g_last_error = message;
  return FM_ERR_INVALID_ARGUMENT;
}

std::span<const double> as_span(const double* data, size_t n) { return {data, n}; }

fm_interval to_c_interval(const facimean::ConfidenceInterval& ci) {
  fm_interval out;
  out.lower = ci.lower;
  out.upper = ci.upper;
  out.level = ci.level;
  switch (ci.method) {
    case facimean::IntervalMethod::SupIntersection: out.method = FM_METHOD_SUP; break;
    case facimean::IntervalMethod::FixedT0: out.method = FM_METHOD_T0; break;
    case facimean::IntervalMethod::IntegralWeighted: out.method = FM_METHOD_INTEGRAL; break;
  }
  out.t0 = ci.t0;
  out.empty = ci.empty ? 1 : 0;
  return out;
}

}  // namespace

struct fm_process {
  facimean::StepProcess process;
};

struct fm_simulation {
  facimean::SimulationConfig config;
  std::string report_json;
  std::string summary;
};

extern "C" {

const char* fm_status_name(fm_status status) {
  switch (status) {
    case FM_OK: return "FM_OK";
    case FM_ERR_TOO_FEW_OBSERVATIONS: return "FM_ERR_TOO_FEW_OBSERVATIONS";
    case FM_ERR_DEGENERATE_SAMPLE: return "FM_ERR_DEGENERATE_SAMPLE";
    case FM_ERR_DEGENERATE_WEIGHTS: return "FM_ERR_DEGENERATE_WEIGHTS";
    case FM_ERR_DEGENERATE_WEIGHTED_CENTER: return "FM_ERR_DEGENERATE_WEIGHTED_CENTER";
    case FM_ERR_ZERO_TIME_INDEX: return "FM_ERR_ZERO_TIME_INDEX";
    case FM_ERR_DOMAIN: return "FM_ERR_DOMAIN";
    case FM_ERR_UNSUPPORTED_DESIGN: return "FM_ERR_UNSUPPORTED_DESIGN";
    case FM_ERR_CONFIG: return "FM_ERR_CONFIG";
    case FM_ERR_IO: return "FM_ERR_IO";
    case FM_ERR_INVALID_ARGUMENT: return "FM_ERR_INVALID_ARGUMENT";
    case FM_ERR_INTERNAL: return "FM_ERR_INTERNAL";
  }
  return "FM_ERR_UNKNOWN";
}

const char* fm_last_error_message(void) { return g_last_error.c_str(); }

const char* fm_version(void) { return "0.1.0"; }

fm_status fm_student_statistic(const double* data, size_t n, double* out) {
  if (data == nullptr || out == nullptr) return invalid("data and out must be non-null");
  return guarded([&] { *out = facimean::student_statistic(as_span(data, n)); });
}

fm_status fm_self_normalized_sum(const double* data, size_t n, double* out) {
  if (data == nullptr || out == nullptr) return invalid("data and out must be non-null");
  return guarded([&] { *out = facimean::self_normalized_sum(as_span(data, n)); });
}

fm_status fm_centered_sum_squares(const double* data, size_t n, double* out) {
  if (data == nullptr || out == nullptr) return invalid("data and out must be non-null");
  return guarded([&] { *out = facimean::centered_sum_squares(as_span(data, n)); });
}

fm_status fm_max_ratio(const double* data, size_t n, int use_known_center, double center,
                       double* out) {
  if (data == nullptr || out == nullptr) return invalid("data and out must be non-null");
  return guarded([&] {
    std::optional<double> known;
    if (use_known_center != 0) known = center;
    *out = facimean::max_ratio_diagnostic(as_span(data, n), known);
  });
}

fm_status fm_ci_sup(const double* data, size_t n, double alpha, fm_interval* out) {
  if (data == nullptr || out == nullptr) return invalid("data and out must be non-null");
  return guarded([&] { *out = to_c_interval(facimean::faci_sup(as_span(data, n), alpha)); });
}

fm_status fm_ci_t0(const double* data, size_t n, double t0, double alpha, fm_interval* out) {
  if (data == nullptr || out == nullptr) return invalid("data and out must be non-null");
  return guarded([&] { *out = to_c_interval(facimean::faci_t0(as_span(data, n), t0, alpha)); });
}

fm_status fm_ci_integral(const double* data, size_t n, double alpha, fm_interval* out) {
  if (data == nullptr || out == nullptr) return invalid("data and out must be non-null");
  return guarded([&] { *out = to_c_interval(facimean::faci_integral(as_span(data, n), alpha)); });
}

fm_status fm_quantile_sup_abs(double alpha, double* out) {
  if (out == nullptr) return invalid("out must be non-null");
  return guarded([&] { *out = facimean::sup_abs_wiener_quantile(alpha); });
}

fm_status fm_quantile_endpoint(double t0, double alpha, double* out) {
  if (out == nullptr) return invalid("out must be non-null");
  return guarded(
      [&] { *out = facimean::functional_limit_quantile(facimean::Endpoint{t0}, alpha); });
}

fm_status fm_quantile_integral(double alpha, double* out) {
  if (out == nullptr) return invalid("out must be non-null");
  return guarded([&] { *out = facimean::functional_limit_quantile(facimean::Integral{}, alpha); });
}

fm_status fm_normal_quantile(double p, double* out) {
  if (out == nullptr) return invalid("out must be non-null");
  return guarded([&] { *out = facimean::normal_quantile(p); });
}

fm_status fm_process_build(const double* data, size_t n, fm_time_function kind, double mu,
                           const double* sigma2, fm_process** out) {
  if (data == nullptr || out == nullptr) return invalid("data and out must be non-null");
  *out = nullptr;
  return guarded([&] {
    facimean::TimeFunctionKind tf;
    switch (kind) {
      case FM_TIME_ORACLE: {
        std::vector<double> variances;
        if (sigma2 != nullptr) {
          variances.assign(sigma2, sigma2 + n);
        } else {
          variances.assign(n, 1.0);
        }
        tf = facimean::OracleVariance{facimean::VarianceProfile::from_variances(std::move(variances))};
        break;
      }
      case FM_TIME_RAW: tf = facimean::RawSquares{mu}; break;
      case FM_TIME_CENTERED: tf = facimean::CenteredSquares{}; break;
      default: facimean::raise(facimean::ErrorCode::InvalidArgument, "unknown time function kind");
    }
    auto handle = std::make_unique<fm_process>();
    handle->process = facimean::student_process(as_span(data, n), tf);
    *out = handle.release();
  });
}

void fm_process_free(fm_process* process) { delete process; }

size_t fm_process_point_count(const fm_process* process) {
  return process == nullptr ? 0 : process->process.values.size();
}

fm_status fm_process_copy(const fm_process* process, double* breakpoints, double* values) {
  if (process == nullptr || breakpoints == nullptr || values == nullptr) {
    return invalid("process, breakpoints and values must be non-null");
  }
  const auto& p = process->process;
  std::memcpy(breakpoints, p.breakpoints.data(), p.breakpoints.size() * sizeof(double));
  std::memcpy(values, p.values.data(), p.values.size() * sizeof(double));
  g_last_error.clear();
  return FM_OK;
}

fm_status fm_process_value_at(const fm_process* process, double t, double* out) {
  if (process == nullptr || out == nullptr) return invalid("process and out must be non-null");
  return guarded([&] { *out = process->process.value_at(t); });
}

fm_status fm_process_sup_abs(const fm_process* process, double* out) {
  if (process == nullptr || out == nullptr) return invalid("process and out must be non-null");
  return guarded([&] { *out = facimean::sup_abs_functional(process->process); });
}

fm_status fm_process_integral(const fm_process* process, double* out) {
  if (process == nullptr || out == nullptr) return invalid("process and out must be non-null");
  return guarded([&] { *out = facimean::integral_functional(process->process); });
}

fm_status fm_simulation_create(const char* config_json, fm_simulation** out) {
  if (config_json == nullptr || out == nullptr) {
    return invalid("config_json and out must be non-null");
  }
  *out = nullptr;
  return guarded([&] {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(config_json);
    } catch (const nlohmann::json::parse_error& e) {
      facimean::raise(facimean::ErrorCode::ConfigError, std::string("config is not valid JSON: ") + e.what());
    }
    auto handle = std::make_unique<fm_simulation>();
    handle->config = facimean::config_from_json(j);
    *out = handle.release();
  });
}

void fm_simulation_free(fm_simulation* simulation) { delete simulation; }

fm_status fm_simulation_run(fm_simulation* simulation, const char* experiment, int threads) {
  if (simulation == nullptr || experiment == nullptr) {
    return invalid("simulation and experiment must be non-null");
  }
  return guarded([&] {
    const unsigned worker_count =
        threads <= 0 ? facimean::default_thread_count() : static_cast<unsigned>(threads);
    const std::string name = experiment;
    nlohmann::json report;
    if (name == "coverage") {
      const auto result = facimean::coverage_experiment(simulation->config, worker_count);
      report = facimean::report_to_json(result);
      simulation->summary = facimean::summary_line(result);
    } else if (name == "fit") {
      const auto result = facimean::fclt_fit_experiment(simulation->config, worker_count);
      report = facimean::report_to_json(result);
      simulation->summary = facimean::summary_line(result);
    } else if (name == "discrepancy") {
      const auto result = facimean::discrepancy_experiment(simulation->config, worker_count);
      report = facimean::report_to_json(result);
      simulation->summary = facimean::summary_line(result);
    } else {
      facimean::raise(facimean::ErrorCode::InvalidArgument,
                      "experiment must be one of coverage, fit, discrepancy");
    }
    simulation->report_json = report.dump(2) + "\n";
  });
}

const char* fm_simulation_report_json(const fm_simulation* simulation) {
  if (simulation == nullptr || simulation->report_json.empty()) return nullptr;
  return simulation->report_json.c_str();
}

const char* fm_simulation_summary(const fm_simulation* simulation) {
  if (simulation == nullptr || simulation->summary.empty()) return nullptr;
  return simulation->summary.c_str();
}

fm_status fm_simulation_write_report(const fm_simulation* simulation, const char* path) {
  if (simulation == nullptr || path == nullptr) {
    return invalid("simulation and path must be non-null");
  }
  if (simulation->report_json.empty()) {
    g_last_error = "no report available; run the simulation first";
    return FM_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    std::ofstream out(path);
    if (!out) {
      facimean::raise(facimean::ErrorCode::IoError, std::string("cannot open '") + path + "' for writing");
    }
    out << simulation->report_json;
    if (!out) {
      facimean::raise(facimean::ErrorCode::IoError, std::string("write to '") + path + "' failed");
    }
  });
}

fm_status fm_simulation_write_sample(const fm_simulation* simulation, uint64_t replication,
                                     const char* path) {
  if (simulation == nullptr || path == nullptr) {
    return invalid("simulation and path must be non-null");
  }
  return guarded([&] {
    const std::vector<double> sample =
        facimean::replication_sample(simulation->config, replication);
    facimean::write_sample_file(sample, path);
  });
}

}  // extern "C"
