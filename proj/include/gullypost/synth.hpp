#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gullypost/io.hpp"
#include "gullypost/types.hpp"

namespace gully::synth {

// Sinuous V/U channel cut into a sloping plane. The profile is a flat
// floor with straight walls at `wall_slope_deg`, extruded along
// y = sin_amplitude * sin(2 pi x / sin_wavelength).
struct SceneParams {
  double length = 300.0;          // m along the channel axis
  double depth = 8.0;             // rim-to-floor, m
  double floor_width = 4.0;       // m
  double wall_slope_deg = 50.0;   // degrees from horizontal
  double sin_amplitude = 20.0;    // m
  double sin_wavelength = 150.0;  // m
  double density = 4.0;           // sampled points per m^2
  double traj_spacing = 1.0;      // m between trajectory stations
  double dom_cell = 1.0;          // m
  std::uint64_t seed = 1;
};

struct DriftParams {
  double true_fh = 1.0;           // recovering these factors undoes the drift
  double true_fe = 1.0;
  double point_noise = 0.0;       // Gaussian sigma per axis on map points, m
  double wobble_amplitude = 0.0;  // sinusoidal trajectory wobble, m
  double wobble_wavelength = 60.0;  // s
  double baro_noise = 0.0;        // Gaussian sigma on pressures, Pa
};

struct Scene {
  PointCloud map;         // frame "truth"
  Trajectory traj;        // thalweg at 1 m/s, t = arc length
  io::DomRaster dom;
  std::vector<io::BarometerSample> baro;  // noiseless
};

double centerline_y(const SceneParams& params, double x);
double rim_half_width(const SceneParams& params);

// Deterministic for a fixed seed.
Scene gen_scene(const SceneParams& params);

struct Drifted {
  PointCloud map;   // frame "drifted"
  Trajectory traj;
};

// Divides XY by true_fh and z by true_fe, then adds Gaussian noise to
// map points and sinusoidal wobble to the trajectory. With unit factors
// and zero noise the coordinates are bit-identical to the input.
Drifted inject_drift(const PointCloud& map, const Trajectory& traj,
                     const DriftParams& params, std::uint64_t seed);

// International standard-atmosphere pressure at an altitude.
double isa_pressure(double altitude, double p0 = 101325.0);

struct AccuracyReport {
  double elevation_bias = 0.0;
  double elevation_rmse = 0.0;
  double endpoint_bias = 0.0;
  double displacement_error_pct = 0.0;
  double distance_error_pct = 0.0;
};

// Benchmark samples are (t, z) pairs with non-decreasing t; each is
// matched to the nearest-in-time trajectory sample. Endpoint metrics
// compare the final trajectory position against `end` in XY; `start`
// is carried for completeness and does not enter any metric.
AccuracyReport evaluate(const Trajectory& corrected,
                        const std::vector<std::pair<double, double>>& benchmark,
                        const Point3& start, const Point3& end,
                        double reference_displacement,
                        double reference_distance);

// Writes a bundle directory: map.ply and trajectory.csv (drifted),
// dom.pgm + dom.wld, baro.csv (noised), truth.json (flat scalars).
void write_scene_bundle(const std::string& dir, const SceneParams& scene,
                        const DriftParams& drift, std::uint64_t drift_seed);

}  // namespace gully::synth
