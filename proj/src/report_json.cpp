#include "report_json.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace facimean {

namespace {

using nlohmann::json;

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  raise(ErrorCode::ConfigError, "config field '" + field + "': " + what);
}

const json& require_field(const json& j, const std::string& field) {
  auto it = j.find(field);
  if (it == j.end()) field_error(field, "missing");
  return *it;
}

double require_number(const json& j, const std::string& field) {
  const json& v = require_field(j, field);
  if (!v.is_number()) field_error(field, "must be a number");
  return v.get<double>();
}

std::uint64_t require_unsigned(const json& j, const std::string& field) {
  const json& v = require_field(j, field);
  if (!v.is_number_integer()) field_error(field, "must be a nonnegative integer");
  if (!v.is_number_unsigned() && v.get<std::int64_t>() < 0) {
    field_error(field, "must be a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

}  // namespace

SimulationConfig config_from_json(const json& j) {
  if (!j.is_object()) {
    raise(ErrorCode::ConfigError, "config document must be a JSON object");
  }
  const std::uint64_t version = require_unsigned(j, "schema_version");
  if (version != 1) field_error("schema_version", "unsupported version");

  SimulationConfig config;

  const json& dj = require_field(j, "design");
  if (!dj.is_object()) field_error("design", "must be an object");
  const std::string kind = [&] {
    auto it = dj.find("kind");
    if (it == dj.end()) field_error("design.kind", "missing");
    if (!it->is_string()) field_error("design.kind", "must be a string");
    return it->get<std::string>();
  }();
  const auto design_number = [&](const char* name) {
    auto it = dj.find(name);
    if (it == dj.end()) field_error(std::string("design.") + name, "missing");
    if (!it->is_number()) field_error(std::string("design.") + name, "must be a number");
    return it->get<double>();
  };
  const auto design_positive = [&](const char* name) {
    const double v = design_number(name);
    if (!(v > 0.0)) field_error(std::string("design.") + name, "must be positive");
    return v;
  };
  if (kind == "iid_normal") {
    config.design = IidNormal{design_number("mu"), design_positive("sigma")};
  } else if (kind == "hetero_normal") {
    auto it = dj.find("sigma_pattern");
    if (it == dj.end()) field_error("design.sigma_pattern", "missing");
    if (!it->is_array() || it->empty()) {
      field_error("design.sigma_pattern", "must be a non-empty array");
    }
    HeteroNormal design;
    design.mu = design_number("mu");
    for (const json& v : *it) {
      if (!v.is_number() || !(v.get<double>() > 0.0)) {
        field_error("design.sigma_pattern", "entries must be positive numbers");
      }
      design.sigma_pattern.push_back(v.get<double>());
    }
    config.design = std::move(design);
  } else if (kind == "iid_uniform") {
    config.design = IidUniform{design_number("mu"), design_positive("half_width")};
  } else if (kind == "symmetric_two_point") {
    config.design = SymmetricTwoPoint{design_number("mu"), design_positive("magnitude")};
  } else if (kind == "symmetric_t") {
    config.design = SymmetricT{design_number("mu"), design_positive("degrees_of_freedom")};
  } else if (kind == "cauchy") {
    config.design = CauchyDesign{design_number("mu"), design_positive("scale")};
  } else {
    field_error("design.kind", "unknown design '" + kind + "'");
  }

  config.n = require_unsigned(j, "n");
  config.replications = require_unsigned(j, "replications");
  config.alpha = require_number(j, "alpha");
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) field_error("alpha", "must lie in (0,1)");
  config.seed = require_unsigned(j, "seed");

  if (auto it = j.find("methods"); it != j.end()) {
    if (!it->is_array()) field_error("methods", "must be an array");
    for (const json& mj : *it) {
      if (!mj.is_object()) field_error("methods", "entries must be objects");
      const std::string name = [&] {
        auto nit = mj.find("method");
        if (nit == mj.end()) field_error("methods.method", "missing");
        if (!nit->is_string()) field_error("methods.method", "must be a string");
        return nit->get<std::string>();
      }();
      MethodSpec spec;
      if (name == "sup") {
        spec.method = IntervalMethod::SupIntersection;
      } else if (name == "t0") {
        spec.method = IntervalMethod::FixedT0;
        auto tit = mj.find("t0");
        if (tit == mj.end()) field_error("methods.t0", "missing for method 't0'");
        if (!tit->is_number()) field_error("methods.t0", "must be a number");
        spec.t0 = tit->get<double>();
        if (!(spec.t0 > 0.0 && spec.t0 <= 1.0)) field_error("methods.t0", "must lie in (0,1]");
      } else if (name == "integral") {
        spec.method = IntervalMethod::IntegralWeighted;
      } else {
        field_error("methods.method", "unknown method '" + name + "'");
      }
      config.methods.push_back(spec);
    }
  }

  if (auto it = j.find("kinds"); it != j.end()) {
    if (!it->is_array()) field_error("kinds", "must be an array");
    for (const json& kj : *it) {
      if (!kj.is_object()) field_error("kinds", "entries must be objects");
      const std::string name = [&] {
        auto nit = kj.find("kind");
        if (nit == kj.end()) field_error("kinds.kind", "missing");
        if (!nit->is_string()) field_error("kinds.kind", "must be a string");
        return nit->get<std::string>();
      }();
      if (name == "sup_abs") {
        config.kinds.push_back(SupAbs{});
      } else if (name == "endpoint") {
        auto tit = kj.find("t0");
        if (tit == kj.end()) field_error("kinds.t0", "missing for kind 'endpoint'");
        if (!tit->is_number()) field_error("kinds.t0", "must be a number");
        const double t0 = tit->get<double>();
        if (!(t0 > 0.0 && t0 <= 1.0)) field_error("kinds.t0", "must lie in (0,1]");
        config.kinds.push_back(Endpoint{t0});
      } else if (name == "integral") {
        config.kinds.push_back(Integral{});
      } else {
        field_error("kinds.kind", "unknown kind '" + name + "'");
      }
    }
  }

  if (auto it = j.find("n_grid"); it != j.end()) {
    if (!it->is_array()) field_error("n_grid", "must be an array");
    for (const json& v : *it) {
      if (!v.is_number_integer() || v.get<std::int64_t>() < 2) {
        field_error("n_grid", "entries must be integers >= 2");
      }
      config.n_grid.push_back(v.get<std::size_t>());
    }
  }

  return config;
}

nlohmann::json config_to_json(const SimulationConfig& config) {
  json dj;
  dj["kind"] = design_kind_name(config.design);
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        dj["mu"] = d.mu;
        if constexpr (std::is_same_v<T, IidNormal>) dj["sigma"] = d.sigma;
        else if constexpr (std::is_same_v<T, HeteroNormal>) dj["sigma_pattern"] = d.sigma_pattern;
        else if constexpr (std::is_same_v<T, IidUniform>) dj["half_width"] = d.half_width;
        else if constexpr (std::is_same_v<T, SymmetricTwoPoint>) dj["magnitude"] = d.magnitude;
        else if constexpr (std::is_same_v<T, SymmetricT>)
          dj["degrees_of_freedom"] = d.degrees_of_freedom;
        else dj["scale"] = d.scale;
      },
      config.design);

  json j;
  j["schema_version"] = 1;
  j["design"] = std::move(dj);
  j["n"] = config.n;
  j["replications"] = config.replications;
  j["alpha"] = config.alpha;
  j["seed"] = config.seed;
  if (!config.methods.empty()) {
    json arr = json::array();
    for (const MethodSpec& spec : config.methods) {
      json mj;
      mj["method"] = interval_method_name(spec.method);
      if (spec.method == IntervalMethod::FixedT0) mj["t0"] = spec.t0;
      arr.push_back(std::move(mj));
    }
    j["methods"] = std::move(arr);
  }
  if (!config.kinds.empty()) {
    json arr = json::array();
    for (const FunctionalKind& kind : config.kinds) {
      json kj;
      std::visit(
          [&](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, SupAbs>) {
              kj["kind"] = "sup_abs";
            } else if constexpr (std::is_same_v<T, Endpoint>) {
              kj["kind"] = "endpoint";
              kj["t0"] = k.t0;
            } else {
              kj["kind"] = "integral";
            }
          },
          kind);
      arr.push_back(std::move(kj));
    }
    j["kinds"] = std::move(arr);
  }
  if (!config.n_grid.empty()) j["n_grid"] = config.n_grid;
  return j;
}

nlohmann::json report_to_json(const CoverageReport& report) {
  json j;
  j["schema_version"] = 1;
  j["experiment"] = "coverage";
  j["config"] = config_to_json(report.config);
  j["seed"] = report.config.seed;
  json methods = json::array();
  for (const MethodCoverage& m : report.methods) {
    json mj;
    mj["method"] = interval_method_name(m.spec.method);
    if (m.spec.method == IntervalMethod::FixedT0) mj["t0"] = m.spec.t0;
    mj["coverage"] = m.coverage;
    mj["covered"] = m.covered;
    mj["not_covered"] = m.not_covered;
    mj["empty_count"] = m.empty_count;
    mj["error_count"] = m.error_count;
    mj["mean_length"] = m.mean_length ? json(*m.mean_length) : json(nullptr);
    mj["median_length"] = m.median_length ? json(*m.median_length) : json(nullptr);
    methods.push_back(std::move(mj));
  }
  j["methods"] = std::move(methods);
  return j;
}

nlohmann::json report_to_json(const FitReport& report) {
  json j;
  j["schema_version"] = 1;
  j["experiment"] = "fit";
  j["config"] = config_to_json(report.config);
  j["seed"] = report.config.seed;
  json kinds = json::array();
  for (const KindFit& fit : report.kinds) {
    json kj;
    std::visit(
        [&](const auto& k) {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, SupAbs>) {
            kj["kind"] = "sup_abs";
          } else if constexpr (std::is_same_v<T, Endpoint>) {
            kj["kind"] = "endpoint";
            kj["t0"] = k.t0;
          } else {
            kj["kind"] = "integral";
          }
        },
        fit.kind);
    kj["reference"] = fit.reference;
    kj["ks_distance"] = fit.ks_distance;
    kj["sample_count"] = fit.sample_count;
    kj["error_count"] = fit.error_count;
    kinds.push_back(std::move(kj));
  }
  j["kinds"] = std::move(kinds);
  return j;
}

nlohmann::json report_to_json(const DiscrepancyReport& report) {
  json j;
  j["schema_version"] = 1;
  j["experiment"] = "discrepancy";
  j["config"] = config_to_json(report.config);
  j["seed"] = report.config.seed;
  json points = json::array();
  for (const DiscrepancyPoint& p : report.points) {
    json pj;
    pj["n"] = p.n;
    pj["median_sup_distance"] = p.median_sup_distance;
    points.push_back(std::move(pj));
  }
  j["points"] = std::move(points);
  return j;
}

CoverageReport coverage_report_from_json(const json& j) {
  CoverageReport report;
  report.config = config_from_json(require_field(j, "config"));
  for (const json& mj : require_field(j, "methods")) {
    MethodCoverage m;
    const std::string name = mj.at("method").get<std::string>();
    if (name == "sup") m.spec.method = IntervalMethod::SupIntersection;
    else if (name == "t0") m.spec.method = IntervalMethod::FixedT0;
    else m.spec.method = IntervalMethod::IntegralWeighted;
    if (mj.contains("t0")) m.spec.t0 = mj.at("t0").get<double>();
    m.coverage = mj.at("coverage").get<double>();
    m.covered = mj.at("covered").get<std::size_t>();
    m.not_covered = mj.at("not_covered").get<std::size_t>();
    m.empty_count = mj.at("empty_count").get<std::size_t>();
    m.error_count = mj.at("error_count").get<std::size_t>();
    if (!mj.at("mean_length").is_null()) m.mean_length = mj.at("mean_length").get<double>();
    if (!mj.at("median_length").is_null()) m.median_length = mj.at("median_length").get<double>();
    report.methods.push_back(std::move(m));
  }
  return report;
}

FitReport fit_report_from_json(const json& j) {
  FitReport report;
  report.config = config_from_json(require_field(j, "config"));
  for (const json& kj : require_field(j, "kinds")) {
    KindFit fit;
    const std::string name = kj.at("kind").get<std::string>();
    if (name == "sup_abs") fit.kind = SupAbs{};
    else if (name == "endpoint") fit.kind = Endpoint{kj.at("t0").get<double>()};
    else fit.kind = Integral{};
    fit.reference = kj.at("reference").get<std::string>();
    fit.ks_distance = kj.at("ks_distance").get<double>();
    fit.sample_count = kj.at("sample_count").get<std::size_t>();
    fit.error_count = kj.at("error_count").get<std::size_t>();
    report.kinds.push_back(std::move(fit));
  }
  return report;
}

DiscrepancyReport discrepancy_report_from_json(const json& j) {
  DiscrepancyReport report;
  report.config = config_from_json(require_field(j, "config"));
  for (const json& pj : require_field(j, "points")) {
    DiscrepancyPoint p;
    p.n = pj.at("n").get<std::size_t>();
    p.median_sup_distance = pj.at("median_sup_distance").get<double>();
    report.points.push_back(p);
  }
  return report;
}

namespace {

std::string config_summary_prefix(const char* experiment, const SimulationConfig& config) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "experiment=%s design=%s n=%zu replications=%zu alpha=%g seed=%" PRIu64,
                experiment, design_kind_name(config.design), config.n, config.replications,
                config.alpha, config.seed);
  return buf;
}

}  // namespace

std::string summary_line(const CoverageReport& report) {
  std::ostringstream out;
  out << config_summary_prefix("coverage", report.config);
  for (const MethodCoverage& m : report.methods) {
    out << ' ' << interval_method_name(m.spec.method);
    if (m.spec.method == IntervalMethod::FixedT0) out << '@' << m.spec.t0;
    char buf[64];
    std::snprintf(buf, sizeof(buf), ":coverage=%.6f", m.coverage);
    out << buf;
    if (m.empty_count > 0) out << ",empty=" << m.empty_count;
    if (m.error_count > 0) out << ",errors=" << m.error_count;
  }
  out << " duration_ms=" << report.duration_ms;
  return out.str();
}

std::string summary_line(const FitReport& report) {
  std::ostringstream out;
  out << config_summary_prefix("fit", report.config);
  for (const KindFit& fit : report.kinds) {
    std::visit(
        [&](const auto& k) {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, SupAbs>) out << " sup_abs";
          else if constexpr (std::is_same_v<T, Endpoint>) out << " endpoint@" << k.t0;
          else out << " integral";
        },
        fit.kind);
    char buf[64];
    std::snprintf(buf, sizeof(buf), ":ks=%.6f", fit.ks_distance);
    out << buf;
    if (fit.error_count > 0) out << ",errors=" << fit.error_count;
  }
  out << " duration_ms=" << report.duration_ms;
  return out.str();
}

std::string summary_line(const DiscrepancyReport& report) {
  std::ostringstream out;
  out << config_summary_prefix("discrepancy", report.config);
  for (const DiscrepancyPoint& p : report.points) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), " n=%zu:median=%.6f", p.n, p.median_sup_distance);
    out << buf;
  }
  out << " duration_ms=" << report.duration_ms;
  return out.str();
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    raise(ErrorCode::IoError, "cannot open '" + path + "' for reading");
  }
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    raise(ErrorCode::ConfigError, "cannot parse '" + path + "': " + e.what());
  }
  return j;
}

void persist_report(const nlohmann::json& document, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    raise(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  }
  out << document.dump(2) << '\n';
  if (!out) {
    raise(ErrorCode::IoError, "write to '" + path + "' failed");
  }
}

void write_sample_file(std::span<const double> values, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    raise(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  }
  char buf[64];
  for (double v : values) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", v);
    out << buf;
  }
  if (!out) {
    raise(ErrorCode::IoError, "write to '" + path + "' failed");
  }
}

}  // namespace facimean
