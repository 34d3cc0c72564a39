#pragma once

#include <vector>

#include "gullypost/types.hpp"

namespace gully::smoothing {

// Local density per point: rho = 3 / (4 pi rbar^3) with rbar the mean
// distance to the k_density nearest neighbours (the point itself
// excluded). Coincident duplicates (rbar = 0) are clamped to the largest
// finite density in the cloud; a cloud where every point degenerates that
// way gets uniform density 1.
std::vector<double> point_density(const PointCloud& cloud, int k_density,
                                  int threads = 0);
std::vector<double> point_density_serial(const PointCloud& cloud,
                                         int k_density);

// Each point is replaced by the density-weighted centroid of its voxel:
// the point itself plus its 2*n_half nearest neighbours, accumulated in
// ascending index order. Colors and frame tag pass through unchanged.
PointCloud smooth_with_density(const PointCloud& cloud,
                               const std::vector<double>& density, int n_half,
                               int threads = 0);
PointCloud smooth_with_density_serial(const PointCloud& cloud,
                                      const std::vector<double>& density,
                                      int n_half);

PointCloud smooth(const PointCloud& cloud, int n_half, int k_density,
                  int threads = 0);
PointCloud smooth_serial(const PointCloud& cloud, int n_half, int k_density);

// Weighted centroid with the sums taken in the order given.
Point3 weighted_centroid(const std::vector<Point3>& pts,
                         const std::vector<double>& weights);

}  // namespace gully::smoothing
