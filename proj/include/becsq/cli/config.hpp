#pragma once

// YAML run configuration. Every physical quantity carries a unit
// ("chi_aa: 0.04 /s", "box: 600 um"); unknown keys are rejected with the
// line number. The canonical form holds SI values with sorted keys, so key
// order and formatting do not change the hash.

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "becsq/experiments.hpp"
#include "becsq/figures.hpp"

namespace becsq::cli {

enum class Kind { two_mode_scan, twa_run, bogoliubov_curve, scaling_sweep, figure };

std::string to_string(Kind kind);

struct RunConfig {
  Kind kind = Kind::two_mode_scan;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trajectories;
  std::optional<std::size_t> workers;

  figures::TwoModeJob two_mode;
  figures::TwaJob twa;
  figures::BogoliubovJob bogoliubov;
  figures::ScalingJob scaling;
  std::string figure;
  experiments::ModeShape mode_shape = experiments::ModeShape::gaussian;
  std::size_t snapshots = 0;

  nlohmann::json canonical = nlohmann::json::object();

  /// Hex SHA-256 of the canonical form.
  std::string hash() const;
};

/// Throws ConfigError with "<source>:<line>: <key>: <problem>" diagnostics.
RunConfig parse_config(const std::string& text, const std::string& source = "config");
RunConfig load_config(const std::string& path);

/// Canonical config for a figure job run without a config file.
RunConfig figure_config(const std::string& name);

std::string sha256_hex(const std::string& data);

}  // namespace becsq::cli
