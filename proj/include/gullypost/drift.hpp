#pragma once

#include <cstdint>
#include <vector>

#include "gullypost/config.hpp"
#include "gullypost/io.hpp"
#include "gullypost/types.hpp"

namespace gully::drift {

// Binary channel raster, same georeferencing convention as DomRaster.
struct ChannelMask {
  int width = 0;
  int height = 0;
  double origin_x = 0.0;  // center of the top-left cell
  double origin_y = 0.0;
  double cell = 1.0;
  std::vector<std::uint8_t> mask;  // 1 = channel

  bool at(int col, int row) const {
    return mask[std::size_t(row) * std::size_t(width) + std::size_t(col)] != 0;
  }
  double center_x(int col) const { return origin_x + col * cell; }
  double center_y(int row) const { return origin_y - row * cell; }
};

// Adaptive-threshold segmentation: a pixel is channel when its value is
// below (1 - bias) times the mean of the window centered on it, windows
// clamped at the borders. `invert` flips the rule to value above
// (1 + bias) times the mean, for imagery where the channel is bright.
ChannelMask segment_channel(const io::DomRaster& dom, int window, double bias,
                            bool invert = false, int threads = 0);
ChannelMask segment_channel_serial(const io::DomRaster& dom, int window,
                                   double bias, bool invert = false);

struct Centerline {
  std::vector<Point3> points;  // z = 0, ordered along the channel
  double spacing = 0.0;        // arc spacing used when sampling
};

// Skeleton of the largest connected channel region: a cubic fitted per
// coordinate over the region's principal-axis parameter, then resampled
// at `spacing`.
Centerline fit_centerline(const ChannelMask& mask, double spacing);

struct FragmentMatch {
  std::vector<Point3> fragment;  // matched centerline window, z = 0
  double scale = 0.0;            // window length / trajectory XY length
  double start = 0.0;            // window start arc on the centerline
  double score = 0.0;            // cosine similarity of centered shapes
};

// Slides windows of 0.5x to 2.0x the trajectory's horizontal length
// (step 0.05) along the centerline and keeps the window whose centered
// shape has the highest cosine similarity with the trajectory's.
FragmentMatch best_fragment(const Trajectory& traj, const Centerline& line,
                            int n_resample = 256);

struct FhResult {
  double f_h = 1.0;
  bool converged = false;
  double rotation = 0.0;
  Point3 translation{0.0, 0.0, 0.0};
  double residual = 0.0;
};

// Horizontal scale via alternating closest-point registration of the
// trajectory's XY shape onto the fragment. Runs from two rotation seeds
// (principal-axis alignment and its flip) and keeps the lower residual.
FhResult estimate_fh(const Trajectory& traj,
                     const std::vector<Point3>& fragment, int max_iter = 50,
                     double tol = 1e-6);

// International barometric formula inverted for altitude.
double pressure_to_altitude(double pressure, double p0);

// Elevation scale: barometric altitude span over trajectory z span,
// endpoints matched to the nearest-in-time barometer samples.
double estimate_fe(const Trajectory& traj,
                   const std::vector<io::BarometerSample>& baro, double p0);

// Zero-phase moving average over each coordinate (window odd, endpoints
// handled by odd reflection) followed by chord subdivision so consecutive
// samples are at most `spacing` apart. Timestamps interpolate linearly.
Trajectory smooth_densify(const Trajectory& traj, int window, double spacing);

Trajectory project_horizontal(const Trajectory& traj);

// Assignment of map points to their nearest anchor in XY. Units are
// numbered 1..J in anchor order; `order` lists original point indices
// grouped by unit, original order kept inside each unit, and
// `unit_begin` (size J+1) delimits the per-unit runs in `order`.
struct UnitPartition {
  std::vector<std::uint32_t> unit;
  std::vector<std::uint32_t> order;
  std::vector<std::uint32_t> unit_begin;

  std::size_t unit_count() const {
    return unit_begin.empty() ? 0 : unit_begin.size() - 1;
  }
};

UnitPartition partition_units(const PointCloud& map, const Trajectory& anchors,
                              int threads = 0);
UnitPartition partition_units_serial(const PointCloud& map,
                                     const Trajectory& anchors);

// Reorders a cloud into the partition's grouped order.
PointCloud apply_partition_order(const PointCloud& cloud,
                                 const UnitPartition& part);

// Multiplies x and y by f_h and z by f_e; timestamps unchanged.
Trajectory scale_trajectory(const Trajectory& traj,
                            const ScalingFactors& factors);

// Translates every point of unit j by sign * (scaled[j] - anchors[j]) and
// returns the cloud in grouped order.
PointCloud correct_map(const PointCloud& map, const UnitPartition& part,
                       const Trajectory& anchors,
                       const Trajectory& anchors_scaled, double sign = 1.0,
                       int threads = 0);
PointCloud correct_map_serial(const PointCloud& map, const UnitPartition& part,
                              const Trajectory& anchors,
                              const Trajectory& anchors_scaled,
                              double sign = 1.0);

struct CorrectionResult {
  PointCloud corrected_map;        // grouped by unit
  Trajectory corrected_trajectory; // input trajectory, scaled
  ScalingFactors factors;
  FragmentMatch match;
  FhResult fh;
  UnitPartition partition;
  Trajectory densified;            // smooth-densified input trajectory
  Trajectory densified_scaled;
};

// Full correction chain: segment, fit centerline, match fragment,
// estimate both scales, partition, translate per unit.
CorrectionResult correct_full(const PointCloud& map, const Trajectory& traj,
                              const std::vector<io::BarometerSample>& baro,
                              const io::DomRaster& dom,
                              const config::Config& cfg,
                              bool allow_nonconverged = false,
                              int threads = 0);

}  // namespace gully::drift
