#pragma once

#include <string>

#include <json.hpp>

#include "simulation.hpp"

namespace facimean {

// Config schema (schema_version 1). Field errors name the offending field.
SimulationConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const SimulationConfig& config);

// Report documents: schema_version, experiment tag, config echo, seed, and
// the per-method / per-kind / per-n results. Wall time never enters the
// document: report files are byte-stable for a fixed seed.
nlohmann::json report_to_json(const CoverageReport& report);
nlohmann::json report_to_json(const FitReport& report);
nlohmann::json report_to_json(const DiscrepancyReport& report);

CoverageReport coverage_report_from_json(const nlohmann::json& j);
FitReport fit_report_from_json(const nlohmann::json& j);
DiscrepancyReport discrepancy_report_from_json(const nlohmann::json& j);

// One-line key=value summary (includes wall time; stdout only).
std::string summary_line(const CoverageReport& report);
std::string summary_line(const FitReport& report);
std::string summary_line(const DiscrepancyReport& report);

nlohmann::json load_json_file(const std::string& path);
void persist_report(const nlohmann::json& document, const std::string& path);
void write_sample_file(std::span<const double> values, const std::string& path);

}  // namespace facimean
