#include "gullypost/section.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "gullypost/io.hpp"
#include "gullypost/smoothing.hpp"

namespace gully::section {
namespace {

std::vector<std::size_t> order_by_w(const std::vector<ChartPoint>& samples) {
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t(0));
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (samples[a].w != samples[b].w) return samples[a].w < samples[b].w;
    return a < b;
  });
  return order;
}

double cross3(const ChartPoint& o, const ChartPoint& a, const ChartPoint& b) {
  return (a.w - o.w) * (b.h - o.h) - (a.h - o.h) * (b.w - o.w);
}

// True for a proper crossing or a collinear overlap of positive length.
bool segments_conflict(const ChartPoint& a1, const ChartPoint& a2,
                       const ChartPoint& b1, const ChartPoint& b2) {
  double d1 = cross3(b1, b2, a1);
  double d2 = cross3(b1, b2, a2);
  double d3 = cross3(a1, a2, b1);
  double d4 = cross3(a1, a2, b2);
  bool astraddle = (d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0);
  bool bstraddle = (d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0);
  if (astraddle && bstraddle) return true;
  if (d1 == 0 && d2 == 0 && d3 == 0 && d4 == 0) {
    // project on the dominant axis and require interior overlap
    bool use_w = std::abs(a2.w - a1.w) + std::abs(b2.w - b1.w) >=
                 std::abs(a2.h - a1.h) + std::abs(b2.h - b1.h);
    double alo = use_w ? std::min(a1.w, a2.w) : std::min(a1.h, a2.h);
    double ahi = use_w ? std::max(a1.w, a2.w) : std::max(a1.h, a2.h);
    double blo = use_w ? std::min(b1.w, b2.w) : std::min(b1.h, b2.h);
    double bhi = use_w ? std::max(b1.w, b2.w) : std::max(b1.h, b2.h);
    return std::max(alo, blo) < std::min(ahi, bhi);
  }
  return false;
}

}  // namespace

SectionPlane station_plane(const Trajectory& traj, std::size_t j, int span) {
  if (span < 1) throw std::invalid_argument("span must be positive");
  std::size_t n = traj.samples.size();
  if (j < std::size_t(span) || j + std::size_t(span) >= n)
    throw std::invalid_argument("section window exceeds trajectory");
  SectionPlane plane;
  plane.origin = traj.samples[j].position;
  plane.normal =
      traj.samples[j + std::size_t(span)].position -
      traj.samples[j - std::size_t(span)].position;
  plane.span = span;
  if (plane.normal.norm() == 0.0) throw NumericError("zero section normal");
  return plane;
}

PointCloud fuse_units(const PointCloud& grouped,
                      const drift::UnitPartition& part, std::size_t unit,
                      int span) {
  if (span < 0) throw std::invalid_argument("span must be non-negative");
  if (part.order.size() != grouped.size())
    throw std::invalid_argument("partition does not match cloud");
  std::size_t J = part.unit_count();
  if (unit < std::size_t(span) + 1 || unit + std::size_t(span) > J)
    throw std::invalid_argument("section window exceeds trajectory");
  std::size_t begin = part.unit_begin[unit - std::size_t(span) - 1];
  std::size_t end = part.unit_begin[unit + std::size_t(span)];
  PointCloud out;
  out.frame = grouped.frame;
  out.points.assign(grouped.points.begin() + long(begin),
                    grouped.points.begin() + long(end));
  if (grouped.has_color_channel())
    out.colors.assign(grouped.colors.begin() + long(begin),
                      grouped.colors.begin() + long(end));
  return out;
}

PointCloud project_points(const PointCloud& cloud, const SectionPlane& plane,
                          PlaneDenominator denominator) {
  double n2 = plane.normal.squared_norm();
  if (n2 == 0.0) throw NumericError("zero section normal");
  double den =
      denominator == PlaneDenominator::squared ? n2 : std::sqrt(n2);
  PointCloud out = cloud;
  for (Point3& p : out.points) {
    double alpha = dot(p - plane.origin, plane.normal) / den;
    p = p - plane.normal * alpha;
  }
  return out;
}

std::vector<ChartPoint> to_plane_coords(const PointCloud& cloud,
                                        const SectionPlane& plane) {
  double hn = std::hypot(plane.normal.x, plane.normal.y);
  if (hn == 0.0) throw NumericError("degenerate section plane");
  double ux = -plane.normal.y / hn;
  double uy = plane.normal.x / hn;
  std::vector<ChartPoint> out(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point3& p = cloud.points[i];
    out[i].w = (p.x - plane.origin.x) * ux + (p.y - plane.origin.y) * uy;
    out[i].h = p.z - plane.origin.z;
  }
  return out;
}

std::vector<PointLabel> classify_wall_ground(
    const std::vector<ChartPoint>& samples, double slope_threshold) {
  std::size_t n = samples.size();
  if (n < 2) throw std::invalid_argument("need at least 2 samples");
  if (!(slope_threshold > 0.0))
    throw std::invalid_argument("slope_threshold must be positive");
  auto order = order_by_w(samples);
  std::vector<PointLabel> labels(n, PointLabel::ground);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t lo = i >= 2 ? i - 2 : 0;
    std::size_t hi = std::min(n - 1, i + 2);
    double wbar = 0.0, hbar = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) {
      wbar += samples[order[k]].w;
      hbar += samples[order[k]].h;
    }
    double cnt = double(hi - lo + 1);
    wbar /= cnt;
    hbar /= cnt;
    double sww = 0.0, swh = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) {
      double dw = samples[order[k]].w - wbar;
      double dh = samples[order[k]].h - hbar;
      sww += dw * dw;
      swh += dw * dh;
    }
    bool wall = sww == 0.0 || std::abs(swh / sww) > slope_threshold;
    labels[order[i]] = wall ? PointLabel::wall : PointLabel::ground;
  }
  return labels;
}

std::vector<ProfilePoint> reconstruct(const std::vector<ChartPoint>& samples,
                                      const std::vector<PointLabel>& labels,
                                      int voxel_half, int density_k,
                                      double spacing) {
  if (samples.size() != labels.size())
    throw std::invalid_argument("labels must match samples");
  if (spacing <= 0.0) throw std::invalid_argument("spacing must be positive");
  if (voxel_half < 0)
    throw std::invalid_argument("voxel_half must be non-negative");
  std::size_t n = samples.size();
  if (n < std::size_t(2 * voxel_half + 1))
    throw std::invalid_argument("too few samples in section");

  PointCloud chart;
  chart.points.reserve(n);
  for (const ChartPoint& s : samples)
    chart.points.push_back(Point3{s.w, s.h, 0.0});
  PointCloud sm = smoothing::smooth(chart, voxel_half, density_k);

  std::vector<ChartPoint> moved(n);
  for (std::size_t i = 0; i < n; ++i)
    moved[i] = ChartPoint{sm.points[i].x, sm.points[i].y};
  auto order = order_by_w(moved);

  struct Entry {
    double w;
    double h;
    PointLabel label;
  };
  std::vector<Entry> seq(n);
  for (std::size_t i = 0; i < n; ++i)
    seq[i] = Entry{moved[order[i]].w, moved[order[i]].h, labels[order[i]]};

  double ground_sum = 0.0;
  std::size_t ground_count = 0;
  double all_sum = 0.0;
  for (const Entry& e : seq) {
    all_sum += e.w;
    if (e.label == PointLabel::ground) {
      ground_sum += e.w;
      ++ground_count;
    }
  }
  double ref_w = ground_count > 0 ? ground_sum / double(ground_count)
                                  : all_sum / double(n);

  std::vector<std::size_t> left, ground, right;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && seq[j].label == seq[i].label) ++j;
    if (seq[i].label == PointLabel::ground) {
      for (std::size_t k = i; k < j; ++k) ground.push_back(k);
    } else {
      double mean = 0.0;
      for (std::size_t k = i; k < j; ++k) mean += seq[k].w;
      mean /= double(j - i);
      auto& side = mean < ref_w ? left : right;
      for (std::size_t k = i; k < j; ++k) side.push_back(k);
    }
    i = j;
  }
  std::sort(left.begin(), left.end(), [&](std::size_t a, std::size_t b) {
    if (seq[a].h != seq[b].h) return seq[a].h > seq[b].h;
    if (seq[a].w != seq[b].w) return seq[a].w < seq[b].w;
    return a < b;
  });
  std::sort(right.begin(), right.end(), [&](std::size_t a, std::size_t b) {
    if (seq[a].h != seq[b].h) return seq[a].h < seq[b].h;
    if (seq[a].w != seq[b].w) return seq[a].w < seq[b].w;
    return a < b;
  });

  std::vector<Entry> path;
  path.reserve(n);
  for (std::size_t k : left) path.push_back(seq[k]);
  for (std::size_t k : ground) path.push_back(seq[k]);
  for (std::size_t k : right) path.push_back(seq[k]);

  std::vector<ProfilePoint> out;
  out.reserve(path.size() * 2);
  for (std::size_t p = 0; p + 1 < path.size(); ++p) {
    const Entry& a = path[p];
    const Entry& b = path[p + 1];
    out.push_back(ProfilePoint{a.w, a.h, a.label});
    double gap = std::hypot(b.w - a.w, b.h - a.h);
    long m = std::max<long>(1, long(std::ceil(gap / spacing * (1.0 - 1e-12))));
    for (long k = 1; k < m; ++k) {
      double f = double(k) / double(m);
      ProfilePoint ins;
      ins.w = a.w + (b.w - a.w) * f;
      ins.h = a.h + (b.h - a.h) * f;
      ins.label = f <= 0.5 ? a.label : b.label;
      out.push_back(ins);
    }
  }
  out.push_back(
      ProfilePoint{path.back().w, path.back().h, path.back().label});
  return out;
}

double section_area(const std::vector<ProfilePoint>& profile,
                    double cap_elevation) {
  if (profile.size() < 2)
    throw std::invalid_argument("profile needs at least 2 points");
  std::size_t m = profile.size();
  std::vector<ChartPoint> pts(m);
  for (std::size_t i = 0; i < m; ++i)
    pts[i] = ChartPoint{profile[i].w, std::min(profile[i].h, cap_elevation)};

  for (std::size_t i = 0; i + 1 < m; ++i) {
    for (std::size_t j = i + 2; j + 1 < m; ++j) {
      if (segments_conflict(pts[i], pts[i + 1], pts[j], pts[j + 1]))
        throw NumericError("self-intersecting section polygon");
    }
  }

  std::vector<ChartPoint> poly = pts;
  if (poly.back().h != cap_elevation)
    poly.push_back(ChartPoint{poly.back().w, cap_elevation});
  if (poly.front().h != cap_elevation)
    poly.push_back(ChartPoint{poly.front().w, cap_elevation});
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    std::size_t j = (i + 1) % poly.size();
    twice += poly[i].w * poly[j].h - poly[j].w * poly[i].h;
  }
  return std::abs(twice) / 2.0;
}

void write_section_csv(const std::vector<ProfilePoint>& profile,
                       const SectionPlane& plane, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  auto d = [](double v) { return io::format_shortest(v); };
  out << "# origin " << d(plane.origin.x) << ' ' << d(plane.origin.y) << ' '
      << d(plane.origin.z) << " normal " << d(plane.normal.x) << ' '
      << d(plane.normal.y) << ' ' << d(plane.normal.z) << '\n';
  for (const ProfilePoint& p : profile) {
    out << d(p.w) << ',' << d(p.h) << ','
        << (p.label == PointLabel::wall ? "wall" : "ground") << '\n';
  }
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

SectionFile read_section_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  auto parse_d = [&](const std::string& tok, int line) {
    const char* b = tok.data();
    const char* e = b + tok.size();
    if (b != e && *b == '+') ++b;
    double v = 0.0;
    auto r = std::from_chars(b, e, v);
    if (b == e || r.ec != std::errc() || r.ptr != e || !std::isfinite(v))
      throw ParseError(path, line, "invalid number '" + tok + "'");
    return v;
  };
  std::string raw;
  int line = 0;
  if (!std::getline(in, raw)) throw ParseError(path, 1, "missing header comment");
  ++line;
  if (!raw.empty() && raw.back() == '\r') raw.pop_back();
  std::vector<std::string> tok;
  {
    std::size_t i = 0;
    while (i < raw.size()) {
      while (i < raw.size() && raw[i] == ' ') ++i;
      std::size_t s = i;
      while (i < raw.size() && raw[i] != ' ') ++i;
      if (i > s) tok.push_back(raw.substr(s, i - s));
    }
  }
  if (tok.size() != 9 || tok[0] != "#" || tok[1] != "origin" ||
      tok[5] != "normal")
    throw ParseError(path, 1, "missing header comment");
  SectionFile file;
  file.plane.origin = Point3{parse_d(tok[2], 1), parse_d(tok[3], 1),
                             parse_d(tok[4], 1)};
  file.plane.normal = Point3{parse_d(tok[6], 1), parse_d(tok[7], 1),
                             parse_d(tok[8], 1)};
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty()) continue;
    std::size_t c1 = raw.find(',');
    std::size_t c2 = c1 == std::string::npos ? std::string::npos
                                             : raw.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos ||
        raw.find(',', c2 + 1) != std::string::npos)
      throw ParseError(path, line, "expected 3 comma-separated fields");
    ProfilePoint p;
    p.w = parse_d(raw.substr(0, c1), line);
    p.h = parse_d(raw.substr(c1 + 1, c2 - c1 - 1), line);
    std::string label = raw.substr(c2 + 1);
    if (label == "wall")
      p.label = PointLabel::wall;
    else if (label == "ground")
      p.label = PointLabel::ground;
    else
      throw ParseError(path, line, "invalid label '" + label + "'");
    file.profile.push_back(p);
  }
  return file;
}

}  // namespace gully::section
