#pragma once

// Campaign execution: runs the scenarios of a config (optionally along a
// sweep axis), writes per-scenario reports and CSV data, and maps failures
// to error categories.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hqc/config.hpp"

namespace hqc {

struct CampaignOptions {
  std::filesystem::path out;  ///< output root
  std::size_t jobs = 1;
  std::optional<std::uint64_t> seed;  ///< overrides the config seed
};

struct ScenarioOutcome {
  std::string name;
  bool ok = false;
  std::optional<error::category> failure;
  std::string message;  ///< error text when !ok
  std::optional<GateReport> report;
  std::vector<std::string> files;  ///< relative to the output root
};

struct CampaignResult {
  std::vector<ScenarioOutcome> outcomes;
  std::vector<std::string> files;  ///< every file written, relative to the output root
  bool all_ok() const;
  /// Category of the first failed scenario, if any.
  std::optional<error::category> first_failure() const;
};

/// Machine-readable form of a gate report. Wall-clock time is left out so
/// that reports are reproducible byte for byte.
nlohmann::ordered_json report_json(const GateReport& r);

/// Runs every scenario; writes <out>/<dir>/{report.json,summary.txt,
/// trajectory.csv} per scenario and <out>/campaign.json, <out>/summary.txt.
CampaignResult run_campaign(const CampaignConfig& cfg, const CampaignOptions& opt);

/// Runs the first scenario once per sweep value; writes <out>/sweep.csv,
/// <out>/sweep.json and <out>/summary.txt. Failed rows are recorded, not fatal.
/// Throws usage_error when the config has no sweep or the axis is unknown.
CampaignResult run_sweep(const CampaignConfig& cfg, const CampaignOptions& opt);

/// Builds every gate setup without propagating; returns the resolved config.
nlohmann::ordered_json validate_campaign(const CampaignConfig& cfg);

/// CLI exit status for an error category: schema 2, physics guard 3,
/// integration 4, anything else 1.
int exit_code(error::category c);

/// Project version string.
std::string version();

}  // namespace hqc
