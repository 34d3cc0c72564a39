#pragma once

#include <vector>

#include "gullypost/types.hpp"

namespace gully {

// Arc-length helpers for open polylines. Points may be 2D (z = 0) or 3D;
// distances are always Euclidean over all three coordinates.

double polyline_length(const std::vector<Point3>& pts);

// cum[i] = arc length from pts[0] to pts[i]; cum[0] = 0.
std::vector<double> cumulative_arc(const std::vector<Point3>& pts);

// Position at arc length s, clamped to [0, total length].
Point3 point_at_arc(const std::vector<Point3>& pts,
                    const std::vector<double>& cum, double s);

// Samples at arc 0, spacing, 2*spacing, ...; the final vertex is kept
// even when it falls off the regular grid.
std::vector<Point3> resample_by_arc(const std::vector<Point3>& pts,
                                    double spacing);

// Exactly n samples at equal arc steps from the first to the last vertex.
std::vector<Point3> resample_count(const std::vector<Point3>& pts, int n);

}  // namespace gully
