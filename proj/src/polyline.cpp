#include "gullypost/polyline.hpp"

#include <algorithm>
#include <stdexcept>

namespace gully {

double polyline_length(const std::vector<Point3>& pts) {
  double total = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    total += (pts[i] - pts[i - 1]).norm();
  return total;
}

std::vector<double> cumulative_arc(const std::vector<Point3>& pts) {
  std::vector<double> cum(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i)
    cum[i] = cum[i - 1] + (pts[i] - pts[i - 1]).norm();
  return cum;
}

Point3 point_at_arc(const std::vector<Point3>& pts,
                    const std::vector<double>& cum, double s) {
  if (pts.empty()) throw std::invalid_argument("empty polyline");
  if (pts.size() == 1 || s <= 0.0) return pts.front();
  double total = cum.back();
  if (s >= total) return pts.back();
  auto it = std::upper_bound(cum.begin(), cum.end(), s);
  std::size_t hi = std::size_t(it - cum.begin());
  std::size_t lo = hi - 1;
  double seg = cum[hi] - cum[lo];
  if (seg <= 0.0) return pts[lo];
  double f = (s - cum[lo]) / seg;
  return pts[lo] + (pts[hi] - pts[lo]) * f;
}

std::vector<Point3> resample_by_arc(const std::vector<Point3>& pts,
                                    double spacing) {
  if (spacing <= 0.0) throw std::invalid_argument("spacing must be positive");
  if (pts.size() < 2) return pts;
  auto cum = cumulative_arc(pts);
  double total = cum.back();
  std::vector<Point3> out;
  out.reserve(std::size_t(total / spacing) + 2);
  double s = 0.0;
  while (s < total) {
    out.push_back(point_at_arc(pts, cum, s));
    s += spacing;
  }
  if (out.empty() || (pts.back() - out.back()).norm() > 1e-12)
    out.push_back(pts.back());
  return out;
}

std::vector<Point3> resample_count(const std::vector<Point3>& pts, int n) {
  if (n < 2) throw std::invalid_argument("need at least 2 samples");
  if (pts.empty()) throw std::invalid_argument("empty polyline");
  auto cum = cumulative_arc(pts);
  double total = cum.back();
  std::vector<Point3> out;
  out.reserve(std::size_t(n));
  for (int i = 0; i < n; ++i)
    out.push_back(point_at_arc(pts, cum, total * double(i) / double(n - 1)));
  return out;
}

}  // namespace gully
