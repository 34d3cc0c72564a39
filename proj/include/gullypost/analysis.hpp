#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gullypost/io.hpp"
#include "gullypost/types.hpp"

namespace gully::analysis {

// Fills uncolored points from the colored ones: inverse-distance-weighted
// mean over at most k colored neighbours within `radius` (inclusive).
// Uncolored points with no reachable neighbour are dropped; colored
// points pass through unchanged.
PointCloud recolor(const PointCloud& map, int k, double radius,
                   int threads = 0);
PointCloud recolor_serial(const PointCloud& map, int k, double radius);

// Minimum-z grid over the map's XY bounding box snapped to cell
// multiples; cell values are rounded to the nearest quantum, empty cells
// carry the nodata marker. Row 0 is the northernmost row.
io::DemGrid rasterize_dem(const PointCloud& map, double cellsize,
                          double quantum, int threads = 0);
io::DemGrid rasterize_dem_serial(const PointCloud& map, double cellsize,
                                 double quantum);

// Shoelace area of a simple polygon (vertices in order, implicitly
// closed). Self-intersecting rings are rejected.
double polygon_area(const std::vector<std::pair<double, double>>& poly);

double prism_volume(const std::vector<std::pair<double, double>>& base,
                    double length);

// Trapezoidal integration of per-station section areas at fixed spacing.
double deposit_volume_sections(const std::vector<double>& areas,
                               double spacing);

struct DemDiffResult {
  io::DemGrid diff;  // b - a where both grids are valid
  double net = 0.0;  // fill - cut
  double cut = 0.0;
  double fill = 0.0;
};

// Cell-wise change between two grids of identical geometry.
DemDiffResult dem_diff(const io::DemGrid& a, const io::DemGrid& b);

struct VolumeReport {
  std::string method;
  double volume = 0.0;
  std::vector<std::pair<std::string, double>> components;
};

// Line-oriented report: `component<TAB>m3` rows then `TOTAL<TAB>m3`.
std::string format_volume_report(const VolumeReport& report);

}  // namespace gully::analysis
