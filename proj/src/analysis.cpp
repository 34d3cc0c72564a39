#include "gullypost/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gullypost/knn.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gully::analysis {
namespace {

int effective_threads(int threads) {
#ifdef _OPENMP
  return threads > 0 ? threads : omp_get_max_threads();
#else
  (void)threads;
  return threads > 0 ? threads : 1;
#endif
}

PointCloud recolor_impl(const PointCloud& map, int k, double radius,
                        int threads, bool parallel) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
  const std::size_t n = map.size();
  std::vector<std::size_t> colored_idx;
  std::vector<Point3> colored_pts;
  for (std::size_t i = 0; i < n; ++i) {
    if (map.color_at(i).present) {
      colored_idx.push_back(i);
      colored_pts.push_back(map.points[i]);
    }
  }
  if (colored_pts.empty()) throw NumericError("nothing to reference");

  NnIndex index = build_index(colored_pts, 3);
  std::size_t kq = std::min<std::size_t>(std::size_t(k), colored_pts.size());

  std::vector<std::uint8_t> keep(n, 1);
  std::vector<Color> out_color(n);
  auto one = [&](std::size_t i) {
    Color c = map.color_at(i);
    if (c.present) {
      out_color[i] = c;
      return;
    }
    auto nn = knn_query(index, map.points[i], kq);
    double wsum = 0.0;
    double acc[3] = {0.0, 0.0, 0.0};
    for (const Neighbor& h : nn) {
      if (h.distance > radius) break;
      double w = 1.0 / std::max(h.distance, 1e-6);
      const Color& src = map.colors[colored_idx[h.index]];
      acc[0] += w * double(src.r);
      acc[1] += w * double(src.g);
      acc[2] += w * double(src.b);
      wsum += w;
    }
    if (wsum == 0.0) {
      keep[i] = 0;
      return;
    }
    Color fill;
    fill.r = std::uint8_t(std::llround(acc[0] / wsum));
    fill.g = std::uint8_t(std::llround(acc[1] / wsum));
    fill.b = std::uint8_t(std::llround(acc[2] / wsum));
    fill.present = true;
    out_color[i] = fill;
  };
  if (parallel) {
    int nt = effective_threads(threads);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nt)
#endif
    for (long long i = 0; i < (long long)n; ++i) one(std::size_t(i));
    (void)nt;
  } else {
    for (std::size_t i = 0; i < n; ++i) one(i);
  }

  PointCloud out;
  out.frame = map.frame;
  for (std::size_t i = 0; i < n; ++i) {
    if (!keep[i]) continue;
    out.points.push_back(map.points[i]);
    out.colors.push_back(out_color[i]);
  }
  return out;
}

io::DemGrid rasterize_impl(const PointCloud& map, double cellsize,
                           double quantum, int threads, bool parallel) {
  if (map.empty()) throw std::invalid_argument("empty point set");
  if (!(cellsize > 0.0)) throw std::invalid_argument("cellsize must be positive");
  if (!(quantum > 0.0)) throw std::invalid_argument("quantum must be positive");
  double minx = std::numeric_limits<double>::infinity();
  double maxx = -minx, miny = minx, maxy = -minx;
  for (const Point3& p : map.points) {
    minx = std::min(minx, p.x);
    maxx = std::max(maxx, p.x);
    miny = std::min(miny, p.y);
    maxy = std::max(maxy, p.y);
  }
  io::DemGrid dem;
  dem.xllcorner = std::floor(minx / cellsize) * cellsize;
  dem.yllcorner = std::floor(miny / cellsize) * cellsize;
  dem.cellsize = cellsize;
  dem.ncols = int(std::floor((maxx - dem.xllcorner) / cellsize)) + 1;
  dem.nrows = int(std::floor((maxy - dem.yllcorner) / cellsize)) + 1;
  dem.nodata = -9999.0;
  const std::size_t n = map.size();
  std::vector<std::uint32_t> cell(n);
  auto locate = [&](std::size_t i) {
    const Point3& p = map.points[i];
    int col = int(std::floor((p.x - dem.xllcorner) / cellsize));
    int row_s = int(std::floor((p.y - dem.yllcorner) / cellsize));
    col = std::clamp(col, 0, dem.ncols - 1);
    row_s = std::clamp(row_s, 0, dem.nrows - 1);
    int row = dem.nrows - 1 - row_s;  // storage rows run north to south
    cell[i] = std::uint32_t(row) * std::uint32_t(dem.ncols) +
              std::uint32_t(col);
  };
  if (parallel) {
    int nt = effective_threads(threads);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nt)
#endif
    for (long long i = 0; i < (long long)n; ++i) locate(std::size_t(i));
    (void)nt;
  } else {
    for (std::size_t i = 0; i < n; ++i) locate(i);
  }
  std::size_t total = std::size_t(dem.ncols) * std::size_t(dem.nrows);
  std::vector<double> zmin(total, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i)
    zmin[cell[i]] = std::min(zmin[cell[i]], map.points[i].z);
  dem.z.resize(total);
  for (std::size_t c = 0; c < total; ++c) {
    if (std::isinf(zmin[c])) {
      dem.z[c] = dem.nodata;
    } else {
      double q = std::round(zmin[c] / quantum) * quantum;
      dem.z[c] = q == 0.0 ? 0.0 : q;
    }
  }
  return dem;
}

double cross2(const std::pair<double, double>& o,
              const std::pair<double, double>& a,
              const std::pair<double, double>& b) {
  return (a.first - o.first) * (b.second - o.second) -
         (a.second - o.second) * (b.first - o.first);
}

bool ring_conflict(const std::pair<double, double>& a1,
                   const std::pair<double, double>& a2,
                   const std::pair<double, double>& b1,
                   const std::pair<double, double>& b2) {
  double d1 = cross2(b1, b2, a1);
  double d2 = cross2(b1, b2, a2);
  double d3 = cross2(a1, a2, b1);
  double d4 = cross2(a1, a2, b2);
  bool astraddle = (d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0);
  bool bstraddle = (d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0);
  if (astraddle && bstraddle) return true;
  if (d1 == 0 && d2 == 0 && d3 == 0 && d4 == 0) {
    bool use_x = std::abs(a2.first - a1.first) +
                     std::abs(b2.first - b1.first) >=
                 std::abs(a2.second - a1.second) +
                     std::abs(b2.second - b1.second);
    auto key = [&](const std::pair<double, double>& p) {
      return use_x ? p.first : p.second;
    };
    double alo = std::min(key(a1), key(a2));
    double ahi = std::max(key(a1), key(a2));
    double blo = std::min(key(b1), key(b2));
    double bhi = std::max(key(b1), key(b2));
    return std::max(alo, blo) < std::min(ahi, bhi);
  }
  return false;
}

}  // namespace

PointCloud recolor(const PointCloud& map, int k, double radius, int threads) {
  return recolor_impl(map, k, radius, threads, true);
}

PointCloud recolor_serial(const PointCloud& map, int k, double radius) {
  return recolor_impl(map, k, radius, 0, false);
}

io::DemGrid rasterize_dem(const PointCloud& map, double cellsize,
                          double quantum, int threads) {
  return rasterize_impl(map, cellsize, quantum, threads, true);
}

io::DemGrid rasterize_dem_serial(const PointCloud& map, double cellsize,
                                 double quantum) {
  return rasterize_impl(map, cellsize, quantum, 0, false);
}

double polygon_area(const std::vector<std::pair<double, double>>& poly) {
  std::size_t n = poly.size();
  if (n < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (ring_conflict(poly[i], poly[(i + 1) % n], poly[j],
                        poly[(j + 1) % n]))
        throw NumericError("self-intersecting polygon");
    }
  }
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = (i + 1) % n;
    twice += poly[i].first * poly[j].second - poly[j].first * poly[i].second;
  }
  return std::abs(twice) / 2.0;
}

double prism_volume(const std::vector<std::pair<double, double>>& base,
                    double length) {
  if (!(length > 0.0)) throw std::invalid_argument("length must be positive");
  return polygon_area(base) * length;
}

double deposit_volume_sections(const std::vector<double>& areas,
                               double spacing) {
  if (areas.size() < 2)
    throw std::invalid_argument("need at least 2 stations");
  if (!(spacing > 0.0)) throw std::invalid_argument("spacing must be positive");
  for (double a : areas)
    if (a < 0.0) throw std::invalid_argument("negative section area");
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < areas.size(); ++i)
    sum += (areas[i] + areas[i + 1]) / 2.0;
  return spacing * sum;
}

DemDiffResult dem_diff(const io::DemGrid& a, const io::DemGrid& b) {
  if (a.ncols != b.ncols || a.nrows != b.nrows ||
      a.xllcorner != b.xllcorner || a.yllcorner != b.yllcorner ||
      a.cellsize != b.cellsize)
    throw std::invalid_argument("grid geometry mismatch");
  DemDiffResult res;
  res.diff = a;
  res.diff.z.assign(a.z.size(), a.nodata);
  double cell2 = a.cellsize * a.cellsize;
  for (std::size_t i = 0; i < a.z.size(); ++i) {
    if (a.z[i] == a.nodata || b.z[i] == b.nodata) continue;
    double d = b.z[i] - a.z[i];
    res.diff.z[i] = d == 0.0 ? 0.0 : d;
    if (d > 0.0)
      res.fill += d * cell2;
    else
      res.cut += -d * cell2;
  }
  res.net = res.fill - res.cut;
  return res;
}

std::string format_volume_report(const VolumeReport& report) {
  std::string out;
  for (const auto& [label, value] : report.components) {
    out += label;
    out += '\t';
    out += io::format_shortest(value);
    out += '\n';
  }
  out += "TOTAL\t";
  out += io::format_shortest(report.volume);
  out += '\n';
  return out;
}

}  // namespace gully::analysis
