#pragma once

#include <string>

#include <json.hpp>

#include "rpr/experiments.hpp"

namespace rpr {

/// Version stamped into every emitted JSON document; bumped on breaking
/// layout changes so consumers can dispatch.
inline constexpr int REPORT_SCHEMA_VERSION = 1;

/// RFC 4180 field escaping: fields containing commas, quotes or newlines
/// are quoted and embedded quotes doubled.
std::string csv_escape(const std::string& field);

/// CSV rendering of an experiment report: header
/// config,method,metric,value,mc_se and one row per cell, using the
/// canonical number format (infinities as inf/-inf).
std::string report_to_csv(const ExperimentReport& report);

/// JSON rendering: schema_version, study, provenance (config echo + seed)
/// and the rows array. Nonfinite values are encoded as the strings
/// "inf"/"-inf"/"nan" since JSON has no literals for them.
nlohmann::json report_to_json(const ExperimentReport& report);

/// Structural validation of an emitted experiment report document; throws
/// DataError describing the first violation.
void validate_experiment_report(const nlohmann::json& doc);

/// Encodes one double for a JSON report (number, or string for nonfinite).
nlohmann::json json_number(double v);

}  // namespace rpr
