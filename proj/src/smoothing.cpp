#include "gullypost/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "gullypost/knn.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gully::smoothing {
namespace {

int effective_threads(int threads) {
#ifdef _OPENMP
  return threads > 0 ? threads : omp_get_max_threads();
#else
  (void)threads;
  return threads > 0 ? threads : 1;
#endif
}

double mean_neighbor_distance(const NnIndex& index,
                              const std::vector<Point3>& pts,
                              std::size_t self, int k) {
  auto nn = knn_query(index, pts[self], std::size_t(k) + 1);
  double sum = 0.0;
  int counted = 0;
  bool skipped_self = false;
  for (const Neighbor& h : nn) {
    if (!skipped_self && h.index == self) {
      skipped_self = true;
      continue;
    }
    if (counted == k) break;
    sum += h.distance;
    ++counted;
  }
  return sum / double(k);
}

double density_from_rbar(double rbar) {
  return 3.0 / (4.0 * std::numbers::pi * rbar * rbar * rbar);
}

std::vector<double> density_impl(const PointCloud& cloud, int k_density,
                                 int threads, bool parallel) {
  if (k_density < 1)
    throw std::invalid_argument("k_density must be positive");
  const auto& pts = cloud.points;
  NnIndex index = build_index(pts, 3);
  std::size_t n = pts.size();
  if (std::size_t(k_density) + 1 > n)
    throw std::invalid_argument("k exceeds point count");
  std::vector<double> rho(n, 0.0);
  if (parallel) {
    int nt = effective_threads(threads);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nt)
#endif
    for (long long i = 0; i < (long long)n; ++i)
      rho[std::size_t(i)] = density_from_rbar(
          mean_neighbor_distance(index, pts, std::size_t(i), k_density));
    (void)nt;
  } else {
    for (std::size_t i = 0; i < n; ++i)
      rho[i] =
          density_from_rbar(mean_neighbor_distance(index, pts, i, k_density));
  }
  bool any_bad = false;
  double max_finite = -std::numeric_limits<double>::infinity();
  for (double v : rho) {
    if (std::isfinite(v))
      max_finite = std::max(max_finite, v);
    else
      any_bad = true;
  }
  if (any_bad) {
    double fill = std::isfinite(max_finite) ? max_finite : 1.0;
    for (double& v : rho)
      if (!std::isfinite(v)) v = fill;
  }
  return rho;
}

Point3 smoothed_point(const NnIndex& index, const std::vector<Point3>& pts,
                      const std::vector<double>& rho, std::size_t self,
                      int n_half) {
  std::size_t want = std::size_t(2 * n_half);
  auto nn = knn_query(index, pts[self], want + 1);
  std::vector<std::size_t> members;
  members.reserve(want + 1);
  bool skipped_self = false;
  for (const Neighbor& h : nn) {
    if (!skipped_self && h.index == self) {
      skipped_self = true;
      continue;
    }
    if (members.size() == want) break;
    members.push_back(h.index);
  }
  members.push_back(self);
  std::sort(members.begin(), members.end());
  Point3 acc{0.0, 0.0, 0.0};
  double wsum = 0.0;
  for (std::size_t j : members) {
    acc = acc + pts[j] * rho[j];
    wsum += rho[j];
  }
  return acc * (1.0 / wsum);
}

PointCloud smooth_impl(const PointCloud& cloud,
                       const std::vector<double>& density, int n_half,
                       int threads, bool parallel) {
  if (n_half < 0) throw std::invalid_argument("n_half must be non-negative");
  if (density.size() != cloud.size())
    throw std::invalid_argument("density size mismatch");
  const auto& pts = cloud.points;
  NnIndex index = build_index(pts, 3);
  std::size_t n = pts.size();
  if (std::size_t(2 * n_half) + 1 > n)
    throw std::invalid_argument("k exceeds point count");
  PointCloud out = cloud;
  if (parallel) {
    int nt = effective_threads(threads);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nt)
#endif
    for (long long i = 0; i < (long long)n; ++i)
      out.points[std::size_t(i)] =
          smoothed_point(index, pts, density, std::size_t(i), n_half);
    (void)nt;
  } else {
    for (std::size_t i = 0; i < n; ++i)
      out.points[i] = smoothed_point(index, pts, density, i, n_half);
  }
  return out;
}

}  // namespace

std::vector<double> point_density(const PointCloud& cloud, int k_density,
                                  int threads) {
  return density_impl(cloud, k_density, threads, true);
}

std::vector<double> point_density_serial(const PointCloud& cloud,
                                         int k_density) {
  return density_impl(cloud, k_density, 0, false);
}

PointCloud smooth_with_density(const PointCloud& cloud,
                               const std::vector<double>& density, int n_half,
                               int threads) {
  return smooth_impl(cloud, density, n_half, threads, true);
}

PointCloud smooth_with_density_serial(const PointCloud& cloud,
                                      const std::vector<double>& density,
                                      int n_half) {
  return smooth_impl(cloud, density, n_half, 0, false);
}

PointCloud smooth(const PointCloud& cloud, int n_half, int k_density,
                  int threads) {
  return smooth_with_density(cloud, point_density(cloud, k_density, threads),
                             n_half, threads);
}

PointCloud smooth_serial(const PointCloud& cloud, int n_half, int k_density) {
  return smooth_with_density_serial(
      cloud, point_density_serial(cloud, k_density), n_half);
}

Point3 weighted_centroid(const std::vector<Point3>& pts,
                         const std::vector<double>& weights) {
  if (pts.empty() || pts.size() != weights.size())
    throw std::invalid_argument("points and weights must match and be non-empty");
  Point3 acc{0.0, 0.0, 0.0};
  double wsum = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    acc = acc + pts[i] * weights[i];
    wsum += weights[i];
  }
  if (wsum <= 0.0) throw std::invalid_argument("weights must sum positive");
  return acc * (1.0 / wsum);
}

}  // namespace gully::smoothing
