#pragma once

#include <cstdint>
#include <string>

#include "gullypost/types.hpp"

namespace gully::config {

// Every tunable in one place. File format: flat `key = value` lines,
// `#` starts a comment, unknown keys are rejected.
struct Config {
  double p0 = 101325.0;        // reference sea-level pressure, Pa
  int smooth_window = 11;      // trajectory moving-average window (odd)
  double densify_spacing = 0.5;
  int voxel_half = 10;         // neighbours on each side of a voxel seed
  int density_k = 6;           // neighbours for the density estimate
  int section_normal_span = 2; // stations each side for the plane normal
  double section_spacing = 0.05;
  double section_slope_threshold = 1.0;
  int recolor_k = 5;
  double recolor_radius = 0.3;
  double dem_cell = 0.1;
  double dem_quantum = 0.1;
  double correction_sign = 1.0;
  PlaneDenominator plane_denominator = PlaneDenominator::squared;
  int segment_window = 15;     // adaptive-threshold window, px (odd)
  double segment_bias = 0.15;
  bool segment_invert = false;
};

// Throws std::invalid_argument when a value is out of range.
void validate(const Config& cfg);

// Defaults overlaid with the file's assignments, then validated.
Config load_config(const std::string& path);

// Defaults, or the file named by --config, or failing that the file
// named by $GULLYPOST_CONFIG. Flag overrides are applied by the caller.
Config resolve_config(const std::string& cli_path);

// Applies one key/value override on top of an existing config. Bad keys
// or values raise std::invalid_argument.
void set_key(Config& cfg, const std::string& key, const std::string& value);

// Alphabetical `key=value` lines; doubles in shortest round-trip form.
std::string canonical_dump(const Config& cfg);

// FNV-1a over the canonical dump.
std::uint64_t config_hash(const Config& cfg);

}  // namespace gully::config
