#pragma once

// Brute-force reference implementations used by the test suites. These are
// deliberately independent of the library's index structures and kernels:
// exhaustive scans, naive window sums, direct binning. Keep them simple and
// obviously correct; speed does not matter here.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "gullypost/types.hpp"

namespace oracle {

inline double dist2(const gully::Point3& a, const gully::Point3& b, int dims) {
  const double dx = a.x - b.x, dy = a.y - b.y;
  double d2 = dx * dx + dy * dy;
  if (dims == 3) {
    const double dz = a.z - b.z;
    d2 += dz * dz;
  }
  return d2;
}

struct Hit {
  std::size_t index;
  double distance;
};

// Exhaustive k-nearest scan; (distance, index) total order.
inline std::vector<Hit> brute_knn(const std::vector<gully::Point3>& pts,
                                  int dims, const gully::Point3& q,
                                  std::size_t k) {
  std::vector<std::pair<double, std::size_t>> all;
  all.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    all.emplace_back(dist2(pts[i], q, dims), i);
  }
  std::sort(all.begin(), all.end());
  std::vector<Hit> out;
  for (std::size_t i = 0; i < k && i < all.size(); ++i) {
    out.push_back({all[i].second, std::sqrt(all[i].first)});
  }
  return out;
}

// k nearest points other than index `self`, by exhaustive scan.
inline std::vector<Hit> brute_knn_excluding(
    const std::vector<gully::Point3>& pts, int dims, std::size_t self,
    std::size_t k) {
  std::vector<std::pair<double, std::size_t>> all;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i == self) continue;
    all.emplace_back(dist2(pts[i], pts[self], dims), i);
  }
  std::sort(all.begin(), all.end());
  std::vector<Hit> out;
  for (std::size_t i = 0; i < k && i < all.size(); ++i) {
    out.push_back({all[i].second, std::sqrt(all[i].first)});
  }
  return out;
}

// Per-pixel windowed mean over a window x window neighborhood clamped at the
// image borders, summing values directly (no integral image).
inline double naive_window_mean(const std::vector<std::uint8_t>& img,
                                int width, int height, int col, int row,
                                int window) {
  const int h = window / 2;
  const int c0 = std::max(0, col - h), c1 = std::min(width - 1, col + h);
  const int r0 = std::max(0, row - h), r1 = std::min(height - 1, row + h);
  std::uint64_t sum = 0;
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) sum += img[std::size_t(r) * width + c];
  }
  const std::uint64_t count = std::uint64_t(r1 - r0 + 1) * (c1 - c0 + 1);
  return double(sum) / double(count);
}

// Nearest-anchor assignment by exhaustive scan over anchors (XY metric,
// ties to the lower anchor index). Returns 1-based unit indices.
inline std::vector<std::uint32_t> brute_partition(
    const std::vector<gully::Point3>& pts,
    const std::vector<gully::Point3>& anchors) {
  std::vector<std::uint32_t> unit(pts.size(), 0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::size_t best = 0;
    double best_d2 = dist2(pts[i], anchors[0], 2);
    for (std::size_t j = 1; j < anchors.size(); ++j) {
      const double d2 = dist2(pts[i], anchors[j], 2);
      if (d2 < best_d2) {
        best_d2 = d2;
        best = j;
      }
    }
    unit[i] = static_cast<std::uint32_t>(best + 1);
  }
  return unit;
}

// Density-weighted neighborhood smoothing by exhaustive neighbor search:
// voxel = point + 2N nearest others, output = density-weighted centroid
// summed in ascending member index.
inline std::vector<gully::Point3> brute_weighted_smooth(
    const std::vector<gully::Point3>& pts, const std::vector<double>& rho,
    int n_half, int dims) {
  std::vector<gully::Point3> out(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    auto nn = brute_knn_excluding(pts, dims, k, std::size_t(2 * n_half));
    std::vector<std::size_t> members;
    members.push_back(k);
    for (const auto& h : nn) members.push_back(h.index);
    std::sort(members.begin(), members.end());
    double sw = 0.0, sx = 0.0, sy = 0.0, sz = 0.0;
    for (std::size_t m : members) {
      sw += rho[m];
      sx += rho[m] * pts[m].x;
      sy += rho[m] * pts[m].y;
      sz += rho[m] * pts[m].z;
    }
    out[k] = {sx / sw, sy / sw, sz / sw};
  }
  return out;
}

// Direct per-point binning with per-cell minimum, mirroring the grid layout
// contract (lower-left corner snapped to cell multiples, row 0 = north).
struct BruteGrid {
  int ncols, nrows;
  double xll, yll;
  std::vector<double> z;  // NaN = empty, row-major from north
};

inline BruteGrid brute_rasterize(const std::vector<gully::Point3>& pts,
                                 double cell, double quantum) {
  double minx = pts[0].x, maxx = pts[0].x, miny = pts[0].y, maxy = pts[0].y;
  for (const auto& p : pts) {
    minx = std::min(minx, p.x);
    maxx = std::max(maxx, p.x);
    miny = std::min(miny, p.y);
    maxy = std::max(maxy, p.y);
  }
  BruteGrid g;
  g.xll = std::floor(minx / cell) * cell;
  g.yll = std::floor(miny / cell) * cell;
  g.ncols = int(std::floor((maxx - g.xll) / cell)) + 1;
  g.nrows = int(std::floor((maxy - g.yll) / cell)) + 1;
  g.z.assign(std::size_t(g.ncols) * g.nrows,
             std::numeric_limits<double>::quiet_NaN());
  for (const auto& p : pts) {
    int c = int(std::floor((p.x - g.xll) / cell));
    int r = int(std::floor((p.y - g.yll) / cell));
    c = std::clamp(c, 0, g.ncols - 1);
    r = std::clamp(r, 0, g.nrows - 1);
    const std::size_t i = std::size_t(g.nrows - 1 - r) * g.ncols + c;
    if (std::isnan(g.z[i]) || p.z < g.z[i]) g.z[i] = p.z;
  }
  for (auto& v : g.z) {
    if (!std::isnan(v)) {
      v = std::round(v / quantum) * quantum;
      if (v == 0.0) v = 0.0;
    }
  }
  return g;
}

// Deterministic uniform/gaussian draws for test data. Test-local so suites
// do not depend on the library's generator.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double unit() { return double(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  double gauss() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - unit();
    const double u2 = unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace oracle
