// SPDX-License-Identifier: Apache-2.0
//
// The batch verification harness: seeded sampling over catalog or
// user-configured metrics, one suite per characterizing equation, and
// deterministic machine-readable reports.

#ifndef FINSLER_SUITES_HPP
#define FINSLER_SUITES_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "finsler/catalog.hpp"

namespace finsler::suites {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolName = "finsler-verify";
inline constexpr const char* kToolVersion = "0.1.0";

struct RunConfig {
  std::string suite = "all";
  std::string metric;             // selector string ("catalog:...")
  nlohmann::json metric_inline;   // inline object spec; overrides `metric`
  int samples = 100;
  std::uint64_t seed = 0;
  int dimension = 3;
  int threads = 1;
  std::string kernel = "auto";  // auto | scalar | avx2
  std::map<std::string, double> tolerances;
  std::string report_path;
  std::string format = "text";  // text | json
};

std::vector<std::string> suite_names();
double default_tolerance(const std::string& suite);

/// Parse and validate a config document; unknown keys are rejected and
/// defaults filled in.  Throws ConfigError with the offending field.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig parse_config_text(const std::string& text);
/// Normalized round-trip form (defaults made explicit).
nlohmann::json emit_config(const RunConfig& cfg);

struct SuiteReport {
  nlohmann::ordered_json doc;
  bool all_passed = true;
};

/// Run the configured suite(s).  Throws ConfigError for inapplicable
/// suite/metric combinations and SamplingExhausted when rejection
/// sampling finds no admissible points.
SuiteReport run_suite(const RunConfig& cfg);

/// "json": byte-stable document; "text": one PASS/FAIL line per suite
/// plus a residual table.
std::string emit_report(const SuiteReport& report, const std::string& format);

}  // namespace finsler::suites

#endif
