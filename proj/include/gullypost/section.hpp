#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gullypost/drift.hpp"
#include "gullypost/types.hpp"

namespace gully::section {

// Cutting plane at a trajectory station. The normal is the chord between
// the stations `span` places before and after; it is kept unnormalized.
struct SectionPlane {
  Point3 origin{0.0, 0.0, 0.0};
  Point3 normal{0.0, 0.0, 0.0};
  int span = 0;
};

SectionPlane station_plane(const Trajectory& traj, std::size_t j, int span);

// Concatenation of units unit-span .. unit+span of a grouped cloud
// (units are 1-based).
PointCloud fuse_units(const PointCloud& grouped,
                      const drift::UnitPartition& part, std::size_t unit,
                      int span);

// Projects each point onto the plane along the normal. `denominator`
// chooses the offset scaling: the squared normal length lands points
// exactly on the plane; `literal` keeps the unsquared form.
PointCloud project_points(const PointCloud& cloud, const SectionPlane& plane,
                          PlaneDenominator denominator =
                              PlaneDenominator::squared);

// In-plane chart: w runs along the horizontal unit vector
// (-n_y, n_x, 0) / |(n_x, n_y)|, h is elevation above the origin.
struct ChartPoint {
  double w = 0.0;
  double h = 0.0;
};

std::vector<ChartPoint> to_plane_coords(const PointCloud& cloud,
                                        const SectionPlane& plane);

enum class PointLabel : std::uint8_t { ground = 0, wall = 1 };

// Local |dh/dw| over a 5-sample window of the w-sorted samples; wall
// when the slope exceeds the threshold (a vertical window is always
// wall). Labels are returned in input order.
std::vector<PointLabel> classify_wall_ground(
    const std::vector<ChartPoint>& samples, double slope_threshold);

struct ProfilePoint {
  double w = 0.0;
  double h = 0.0;
  PointLabel label = PointLabel::ground;
};

// Ordered dense profile: density-weighted smoothing in the chart,
// label runs ordered left wall (descending h), ground (ascending w),
// right wall (ascending h), then linear interpolation so consecutive
// gaps are at most `spacing`.
std::vector<ProfilePoint> reconstruct(const std::vector<ChartPoint>& samples,
                                      const std::vector<PointLabel>& labels,
                                      int voxel_half, int density_k,
                                      double spacing);

// Area enclosed by the profile and the horizontal cap at
// `cap_elevation` (heights clamped to the cap), by the shoelace
// formula. A self-intersecting profile is rejected.
double section_area(const std::vector<ProfilePoint>& profile,
                    double cap_elevation);

struct SectionFile {
  SectionPlane plane;
  std::vector<ProfilePoint> profile;
};

// CSV `w,h,label` with one comment line carrying origin and normal.
void write_section_csv(const std::vector<ProfilePoint>& profile,
                       const SectionPlane& plane, const std::string& path);
SectionFile read_section_csv(const std::string& path);

}  // namespace gully::section
