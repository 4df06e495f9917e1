#pragma once

// Scenario configuration: YAML files with one section per library module,
// explicit units on every physical quantity, and a resolved form in which
// every default is written out.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hqc/gate.hpp"

namespace hqc {

/// Angular frequency in rad/us. Accepts "2pi*50 MHz", "2pi x 4 kHz",
/// "314.159 rad/us" and the bare number 0. Cyclic units without the 2pi
/// factor are rejected. field names the key in error messages.
double parse_angular_frequency(std::string_view text, const std::string& field);

/// Time in us, or a multiple of 2pi / lambda' when written "N periods".
struct TimeSpec {
  double value = 0.0;
  bool periods = false;

  double resolve(double lambda_prime) const;
};
TimeSpec parse_time(std::string_view text, const std::string& field);

/// Angle in radians: plain numbers, "pi/2", "3pi/4", "0.25 pi", "90 deg".
double parse_angle(std::string_view text, const std::string& field);

struct ScenarioConfig {
  std::string name;
  std::uint64_t seed = 0;

  GateKind kind = GateKind::phase;
  double phi_c = 0.0;
  Ramp ramp = Ramp::cosine;
  std::vector<double> duration_weights;  ///< relative segment lengths
  bool close_loop = true;                ///< bit-phase only
  std::optional<double> ideal_angle;

  CdSource counterdiabatic = CdSource::numeric;
  double fd_fraction = 1e-4;

  NvDriveConfig drive;
  std::optional<double> lambda_prime;  ///< empty: from the first two driven centres

  Layer layer = Layer::effective;
  TimeSpec total_time{1.0, true};
  NoiseRates noise;
  std::string initial_label = "bell";
  Vector psi_in;
  std::size_t samples = 100;
  double tol = 1e-9;
  std::size_t wilson_steps = 2000;

  std::string output_dir;  ///< relative to the campaign output root
  bool write_trajectory = true;

  /// lambda' in rad/us after resolving "auto".
  double resolved_lambda_prime() const;
  double resolved_total_time() const;
  GateSetup to_setup() const;
  /// Every field with units and defaults made explicit.
  nlohmann::ordered_json resolved() const;
};

struct SweepSpec {
  std::string axis;
  std::vector<double> values;  ///< canonical units of the axis
};

struct CampaignConfig {
  std::vector<ScenarioConfig> scenarios;
  std::optional<SweepSpec> sweep;
  std::string source;  ///< raw config text
  std::string sha256;  ///< hex digest of source
};

/// Parses config text. origin only labels error messages.
CampaignConfig parse_campaign(const std::string& text, const std::string& origin = "config");
CampaignConfig load_campaign(const std::string& path);

/// Numeric fields a sweep may scan.
const std::vector<std::string>& sweep_axes();
/// Parses one sweep value for the axis (quantity strings or plain numbers).
double parse_axis_value(const std::string& axis, std::string_view text);
/// Applies a canonical-unit value to the named field; throws usage_error on
/// unknown axes.
void apply_axis(ScenarioConfig& s, const std::string& axis, double value);

std::string sha256_hex(std::string_view data);

}  // namespace hqc
