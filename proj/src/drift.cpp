#include "gullypost/drift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "gullypost/knn.hpp"
#include "gullypost/polyline.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gully::drift {
namespace {

int effective_threads(int threads) {
#ifdef _OPENMP
  return threads > 0 ? threads : omp_get_max_threads();
#else
  (void)threads;
  return threads > 0 ? threads : 1;
#endif
}

ChannelMask segment_impl(const io::DomRaster& dom, int window, double bias,
                         bool invert, int threads, bool parallel) {
  if (window < 1 || window % 2 == 0)
    throw std::invalid_argument("window must be odd and positive");
  if (!(bias >= 0.0 && bias < 1.0))
    throw std::invalid_argument("bias must be in [0, 1)");
  if (dom.width <= 0 || dom.height <= 0)
    throw std::invalid_argument("empty raster");
  const int w = dom.width;
  const int h = dom.height;
  const std::size_t stride = std::size_t(w) + 1;
  std::vector<std::uint64_t> sat(stride * std::size_t(h + 1), 0);
  for (int row = 0; row < h; ++row) {
    std::uint64_t rowsum = 0;
    for (int col = 0; col < w; ++col) {
      rowsum += dom.at(col, row);
      sat[std::size_t(row + 1) * stride + std::size_t(col + 1)] =
          sat[std::size_t(row) * stride + std::size_t(col + 1)] + rowsum;
    }
  }
  ChannelMask out;
  out.width = w;
  out.height = h;
  out.origin_x = dom.origin_x;
  out.origin_y = dom.origin_y;
  out.cell = dom.cell;
  out.mask.assign(std::size_t(w) * std::size_t(h), 0);
  const int r = window / 2;
  const double factor = invert ? 1.0 + bias : 1.0 - bias;
  auto classify_row = [&](int row) {
    int r0 = std::max(0, row - r);
    int r1 = std::min(h - 1, row + r);
    for (int col = 0; col < w; ++col) {
      int c0 = std::max(0, col - r);
      int c1 = std::min(w - 1, col + r);
      std::uint64_t sum =
          sat[std::size_t(r1 + 1) * stride + std::size_t(c1 + 1)] -
          sat[std::size_t(r0) * stride + std::size_t(c1 + 1)] -
          sat[std::size_t(r1 + 1) * stride + std::size_t(c0)] +
          sat[std::size_t(r0) * stride + std::size_t(c0)];
      double mean = double(sum) / double((r1 - r0 + 1) * (c1 - c0 + 1));
      double v = double(dom.at(col, row));
      bool chan = invert ? (v > mean * factor) : (v < mean * factor);
      out.mask[std::size_t(row) * std::size_t(w) + std::size_t(col)] =
          chan ? 1 : 0;
    }
  };
  if (parallel) {
    int nt = effective_threads(threads);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nt)
#endif
    for (int row = 0; row < h; ++row) classify_row(row);
    (void)nt;
  } else {
    for (int row = 0; row < h; ++row) classify_row(row);
  }
  return out;
}

// Cholesky solve of an m x m system of normal equations (m <= 4);
// false when a pivot collapses.
bool solve_normal(int m, const double A[4][4], const double b[4],
                  double x[4]) {
  double L[4][4] = {};
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = A[i][j];
      for (int k = 0; k < j; ++k) s -= L[i][k] * L[j][k];
      if (i == j) {
        if (!(s > 0.0) || s <= A[i][i] * 1e-12) return false;
        L[i][i] = std::sqrt(s);
      } else {
        L[i][j] = s / L[j][j];
      }
    }
  }
  double y[4];
  for (int i = 0; i < m; ++i) {
    double s = b[i];
    for (int k = 0; k < i; ++k) s -= L[i][k] * y[k];
    y[i] = s / L[i][i];
  }
  for (int i = m - 1; i >= 0; --i) {
    double s = y[i];
    for (int k = i + 1; k < m; ++k) s -= L[k][i] * x[k];
    x[i] = s / L[i][i];
  }
  return true;
}

// Least-squares polynomial over u (pre-scaled to [-1, 1]); the degree is
// reduced until the normal equations are solvable.
std::vector<double> polyfit(const std::vector<double>& u,
                            const std::vector<double>& v, int degree) {
  double mom[7] = {};
  double rhs[4] = {};
  for (std::size_t i = 0; i < u.size(); ++i) {
    double p = 1.0;
    for (int k = 0; k <= 6; ++k) {
      mom[k] += p;
      if (k <= 3) rhs[k] += v[i] * p;
      p *= u[i];
    }
  }
  for (int d = degree; d >= 1; --d) {
    double A[4][4] = {};
    double x[4] = {};
    for (int i = 0; i <= d; ++i)
      for (int j = 0; j <= d; ++j) A[i][j] = mom[i + j];
    if (solve_normal(d + 1, A, rhs, x))
      return std::vector<double>(x, x + d + 1);
  }
  return {rhs[0] / mom[0]};
}

double horner(const std::vector<double>& c, double u) {
  double v = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) v = v * u + c[i];
  return v;
}

double pca_angle_xy(const std::vector<Point3>& pts) {
  double mx = 0.0, my = 0.0;
  for (const Point3& p : pts) {
    mx += p.x;
    my += p.y;
  }
  mx /= double(pts.size());
  my /= double(pts.size());
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const Point3& p : pts) {
    double dx = p.x - mx;
    double dy = p.y - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  return 0.5 * std::atan2(2.0 * sxy, sxx - syy);
}

std::vector<Point3> horizontal_dedup(const Trajectory& traj) {
  std::vector<Point3> out;
  out.reserve(traj.samples.size());
  for (const TrajectorySample& s : traj.samples) {
    Point3 p{s.position.x, s.position.y, 0.0};
    if (out.empty() || (p - out.back()).norm() > 0.0) out.push_back(p);
  }
  return out;
}

}  // namespace

ChannelMask segment_channel(const io::DomRaster& dom, int window, double bias,
                            bool invert, int threads) {
  return segment_impl(dom, window, bias, invert, threads, true);
}

ChannelMask segment_channel_serial(const io::DomRaster& dom, int window,
                                   double bias, bool invert) {
  return segment_impl(dom, window, bias, invert, 0, false);
}

Centerline fit_centerline(const ChannelMask& mask, double spacing) {
  if (spacing <= 0.0) throw std::invalid_argument("spacing must be positive");
  const int w = mask.width;
  const int h = mask.height;
  const std::size_t total = std::size_t(w) * std::size_t(h);
  std::vector<std::int32_t> comp(total, -1);
  std::vector<std::size_t> best;
  std::vector<std::size_t> current;
  std::vector<std::size_t> stack;
  std::int32_t comp_id = 0;
  for (std::size_t start = 0; start < total; ++start) {
    if (mask.mask[start] == 0 || comp[start] >= 0) continue;
    current.clear();
    stack.assign(1, start);
    comp[start] = comp_id;
    while (!stack.empty()) {
      std::size_t idx = stack.back();
      stack.pop_back();
      current.push_back(idx);
      int row = int(idx / std::size_t(w));
      int col = int(idx % std::size_t(w));
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          int nr = row + dr;
          int nc = col + dc;
          if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
          std::size_t nidx = std::size_t(nr) * std::size_t(w) + std::size_t(nc);
          if (mask.mask[nidx] != 0 && comp[nidx] < 0) {
            comp[nidx] = comp_id;
            stack.push_back(nidx);
          }
        }
      }
    }
    if (current.size() > best.size()) best = current;
    ++comp_id;
  }
  if (best.empty()) throw NumericError("no channel pixels");

  std::size_t n = best.size();
  std::vector<double> xs(n), ys(n);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    int row = int(best[i] / std::size_t(w));
    int col = int(best[i] % std::size_t(w));
    xs[i] = mask.center_x(col);
    ys[i] = mask.center_y(row);
    mx += xs[i];
    my += ys[i];
  }
  mx /= double(n);
  my /= double(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = xs[i] - mx;
    double dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  double theta = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
  double ax = std::cos(theta);
  double ay = std::sin(theta);

  std::vector<double> u(n);
  std::vector<double> cx(n), cy(n);
  double pmin = std::numeric_limits<double>::infinity();
  double pmax = -pmin;
  for (std::size_t i = 0; i < n; ++i) {
    cx[i] = xs[i] - mx;
    cy[i] = ys[i] - my;
    u[i] = cx[i] * ax + cy[i] * ay;
    pmin = std::min(pmin, u[i]);
    pmax = std::max(pmax, u[i]);
  }
  double span = pmax - pmin;
  if (span < mask.cell) throw NumericError("channel component too small");
  for (double& ui : u) ui = (2.0 * ui - pmin - pmax) / span;

  std::vector<double> su = u;
  std::sort(su.begin(), su.end());
  int distinct = int(std::unique(su.begin(), su.end()) - su.begin());
  int degree = std::min(3, distinct - 1);

  auto coefx = polyfit(u, cx, degree);
  auto coefy = polyfit(u, cy, degree);

  const int kDense = 4096;
  std::vector<Point3> dense;
  dense.reserve(kDense);
  for (int i = 0; i < kDense; ++i) {
    double ui = -1.0 + 2.0 * double(i) / double(kDense - 1);
    Point3 p{mx + horner(coefx, ui), my + horner(coefy, ui), 0.0};
    if (dense.empty() || (p - dense.back()).norm() > 0.0) dense.push_back(p);
  }
  if (dense.size() < 2) throw NumericError("channel component too small");

  Centerline out;
  out.points = resample_by_arc(dense, spacing);
  out.spacing = spacing;
  return out;
}

FragmentMatch best_fragment(const Trajectory& traj, const Centerline& line,
                            int n_resample) {
  if (n_resample < 2) throw std::invalid_argument("n_resample too small");
  if (traj.samples.size() < 2)
    throw std::invalid_argument("trajectory too short");
  if (line.spacing <= 0.0)
    throw std::invalid_argument("centerline spacing must be positive");
  if (line.points.size() < 2)
    throw NumericError("centerline too short for fragment search");

  std::vector<Point3> txy = horizontal_dedup(traj);
  if (txy.size() < 2) throw NumericError("trajectory has no horizontal extent");
  double lt = polyline_length(txy);
  auto tp = resample_count(txy, n_resample);
  double tmx = 0.0, tmy = 0.0;
  for (const Point3& p : tp) {
    tmx += p.x;
    tmy += p.y;
  }
  tmx /= double(n_resample);
  tmy /= double(n_resample);
  std::vector<double> vt(2 * std::size_t(n_resample));
  double nt2 = 0.0;
  for (int j = 0; j < n_resample; ++j) {
    vt[2 * std::size_t(j)] = tp[std::size_t(j)].x - tmx;
    vt[2 * std::size_t(j) + 1] = tp[std::size_t(j)].y - tmy;
    nt2 += vt[2 * std::size_t(j)] * vt[2 * std::size_t(j)] +
           vt[2 * std::size_t(j) + 1] * vt[2 * std::size_t(j) + 1];
  }
  double nt = std::sqrt(nt2);
  if (nt == 0.0) throw NumericError("trajectory has no horizontal extent");

  auto cum = cumulative_arc(line.points);
  double lc = cum.back();
  FragmentMatch bestm;
  bestm.score = -std::numeric_limits<double>::infinity();
  bool found = false;
  std::vector<Point3> cand(static_cast<std::size_t>(n_resample));
  for (int k = 0; k <= 30; ++k) {
    double s = (10.0 + k) / 20.0;
    double win = s * lt;
    if (win > lc + 1e-9) continue;
    for (long i = 0;; ++i) {
      double start = double(i) * line.spacing;
      if (start + win > lc + 1e-9) break;
      for (int j = 0; j < n_resample; ++j)
        cand[std::size_t(j)] = point_at_arc(
            line.points, cum, start + win * double(j) / double(n_resample - 1));
      double cmx = 0.0, cmy = 0.0;
      for (const Point3& p : cand) {
        cmx += p.x;
        cmy += p.y;
      }
      cmx /= double(n_resample);
      cmy /= double(n_resample);
      double dotv = 0.0;
      double nc2 = 0.0;
      for (int j = 0; j < n_resample; ++j) {
        double qx = cand[std::size_t(j)].x - cmx;
        double qy = cand[std::size_t(j)].y - cmy;
        dotv += vt[2 * std::size_t(j)] * qx + vt[2 * std::size_t(j) + 1] * qy;
        nc2 += qx * qx + qy * qy;
      }
      if (nc2 == 0.0) continue;
      double score = dotv / (nt * std::sqrt(nc2));
      if (score > bestm.score) {
        bestm.score = score;
        bestm.scale = s;
        bestm.start = start;
        bestm.fragment = cand;
        found = true;
      }
    }
  }
  if (!found) throw NumericError("centerline too short for fragment search");
  return bestm;
}

FhResult estimate_fh(const Trajectory& traj,
                     const std::vector<Point3>& fragment, int max_iter,
                     double tol) {
  if (traj.samples.size() < 2)
    throw std::invalid_argument("trajectory too short");
  if (fragment.size() < 2) throw std::invalid_argument("fragment too short");

  std::vector<Point3> txy = horizontal_dedup(traj);
  if (txy.size() < 2) throw NumericError("trajectory has no horizontal extent");
  std::vector<Point3> p = resample_count(txy, int(fragment.size()));
  std::size_t n = p.size();
  Point3 pbar{0.0, 0.0, 0.0};
  for (const Point3& q : p) pbar = pbar + q;
  pbar = pbar * (1.0 / double(n));
  double den = 0.0;
  for (Point3& q : p) {
    q = q - pbar;
    q.z = 0.0;
    den += q.x * q.x + q.y * q.y;
  }
  if (den == 0.0) throw NumericError("trajectory has no horizontal extent");

  NnIndex fidx = build_index(fragment, 2);
  Point3 fbar{0.0, 0.0, 0.0};
  for (const Point3& q : fragment) fbar = fbar + q;
  fbar = fbar * (1.0 / double(fragment.size()));

  double s0 = polyline_length(fragment) / polyline_length(txy);
  double th0 = pca_angle_xy(fragment) - pca_angle_xy(p);

  std::vector<Point3> q(n);
  auto correspond = [&](double s, double th, const Point3& c) {
    double co = std::cos(th);
    double si = std::sin(th);
    for (std::size_t i = 0; i < n; ++i) {
      Point3 y{s * (co * p[i].x - si * p[i].y) + c.x,
               s * (si * p[i].x + co * p[i].y) + c.y, 0.0};
      q[i] = fragment[nearest(fidx, y)];
    }
  };
  auto sse_at = [&](double s, double th, const Point3& c) {
    double co = std::cos(th);
    double si = std::sin(th);
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double dx = s * (co * p[i].x - si * p[i].y) + c.x - q[i].x;
      double dy = s * (si * p[i].x + co * p[i].y) + c.y - q[i].y;
      e += dx * dx + dy * dy;
    }
    return e;
  };

  FhResult best;
  double best_sse = std::numeric_limits<double>::infinity();
  bool have = false;
  for (int seed = 0; seed < 2; ++seed) {
    double th = th0 + (seed == 0 ? 0.0 : std::numbers::pi);
    double s = s0;
    Point3 c = fbar;
    c.z = 0.0;
    bool converged = false;
    for (int iter = 0; iter < max_iter; ++iter) {
      correspond(s, th, c);
      Point3 qbar{0.0, 0.0, 0.0};
      for (const Point3& v : q) qbar = qbar + v;
      qbar = qbar * (1.0 / double(n));
      double cross = 0.0;
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double qx = q[i].x - qbar.x;
        double qy = q[i].y - qbar.y;
        cross += p[i].x * qy - p[i].y * qx;
        dot += p[i].x * qx + p[i].y * qy;
      }
      double th_new = std::atan2(cross, dot);
      double co = std::cos(th_new);
      double si = std::sin(th_new);
      double num = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double rx = co * p[i].x - si * p[i].y;
        double ry = si * p[i].x + co * p[i].y;
        num += rx * (q[i].x - qbar.x) + ry * (q[i].y - qbar.y);
      }
      double s_new = num / den;
      Point3 c_new{qbar.x, qbar.y, 0.0};
      bool done = std::abs(s_new - s) < tol;
      s = s_new;
      th = th_new;
      c = c_new;
      if (done) {
        converged = true;
        break;
      }
    }
    correspond(s, th, c);
    double e = sse_at(s, th, c);
    if (!have || e < best_sse) {
      have = true;
      best_sse = e;
      best.f_h = s;
      best.converged = converged;
      best.rotation = th;
      best.translation = c;
      best.residual = e;
    }
  }
  return best;
}

double pressure_to_altitude(double pressure, double p0) {
  if (!(pressure > 0.0) || !(p0 > 0.0))
    throw std::invalid_argument("pressure must be positive");
  return 44330.0 * (1.0 - std::pow(pressure / p0, 0.190295));
}

double estimate_fe(const Trajectory& traj,
                   const std::vector<io::BarometerSample>& baro, double p0) {
  if (traj.samples.size() < 2)
    throw std::invalid_argument("trajectory too short");
  if (baro.empty()) throw std::invalid_argument("no barometer samples");
  double dz = std::abs(traj.samples.back().position.z -
                       traj.samples.front().position.z);
  if (dz == 0.0) throw NumericError("trajectory has no vertical extent");
  auto nearest_baro = [&](double t) {
    auto it = std::lower_bound(
        baro.begin(), baro.end(), t,
        [](const io::BarometerSample& s, double tv) { return s.t < tv; });
    if (it == baro.begin()) return *it;
    if (it == baro.end()) return baro.back();
    double later = it->t - t;
    double earlier = t - std::prev(it)->t;
    return later < earlier ? *it : *std::prev(it);
  };
  double h0 = pressure_to_altitude(nearest_baro(traj.samples.front().t).pressure, p0);
  double h1 = pressure_to_altitude(nearest_baro(traj.samples.back().t).pressure, p0);
  return std::abs(h1 - h0) / dz;
}

Trajectory smooth_densify(const Trajectory& traj, int window, double spacing) {
  if (window < 1 || window % 2 == 0)
    throw std::invalid_argument("window must be odd and positive");
  if (spacing <= 0.0) throw std::invalid_argument("spacing must be positive");
  const std::size_t n = traj.samples.size();
  if (n <= 1) return traj;
  const long last = long(n) - 1;
  const long half = std::min<long>(window / 2, last);
  auto coord = [&](long j, int axis) {
    const Point3& p = traj.samples[std::size_t(j)].position;
    return axis == 0 ? p.x : axis == 1 ? p.y : p.z;
  };
  auto padded = [&](long j, int axis) {
    if (j < 0) return 2.0 * coord(0, axis) - coord(-j, axis);
    if (j > last) return 2.0 * coord(last, axis) - coord(2 * last - j, axis);
    return coord(j, axis);
  };
  std::vector<TrajectorySample> sm(n);
  const double denom = double(2 * half + 1);
  for (std::size_t i = 0; i < n; ++i) {
    double acc[3] = {0.0, 0.0, 0.0};
    for (long j = long(i) - half; j <= long(i) + half; ++j)
      for (int axis = 0; axis < 3; ++axis) acc[axis] += padded(j, axis);
    sm[i].t = traj.samples[i].t;
    sm[i].position = Point3{acc[0] / denom, acc[1] / denom, acc[2] / denom};
  }
  Trajectory out;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Point3 a = sm[i].position;
    const Point3 b = sm[i + 1].position;
    double chord = (b - a).norm();
    long m = std::max<long>(
        1, long(std::ceil(chord / spacing * (1.0 - 1e-12))));
    for (long k = 0; k < m; ++k) {
      double f = double(k) / double(m);
      TrajectorySample s;
      s.t = sm[i].t + (sm[i + 1].t - sm[i].t) * f;
      s.position = a + (b - a) * f;
      out.samples.push_back(s);
    }
  }
  out.samples.push_back(sm[n - 1]);
  return out;
}

Trajectory project_horizontal(const Trajectory& traj) {
  Trajectory out = traj;
  for (TrajectorySample& s : out.samples) s.position.z = 0.0;
  return out;
}

namespace {

UnitPartition partition_impl(const PointCloud& map, const Trajectory& anchors,
                             int threads, bool parallel) {
  if (anchors.samples.empty()) throw std::invalid_argument("no anchors");
  std::vector<Point3> apts;
  apts.reserve(anchors.samples.size());
  for (const TrajectorySample& s : anchors.samples)
    apts.push_back(Point3{s.position.x, s.position.y, 0.0});
  NnIndex aidx = build_index(apts, 2);
  const std::size_t n = map.size();
  const std::size_t J = apts.size();
  UnitPartition part;
  part.unit.resize(n);
  if (parallel) {
    int nt = effective_threads(threads);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nt)
#endif
    for (long long i = 0; i < (long long)n; ++i)
      part.unit[std::size_t(i)] =
          std::uint32_t(nearest(aidx, map.points[std::size_t(i)]) + 1);
    (void)nt;
  } else {
    for (std::size_t i = 0; i < n; ++i)
      part.unit[i] = std::uint32_t(nearest(aidx, map.points[i]) + 1);
  }
  std::vector<std::uint32_t> count(J + 1, 0);
  for (std::uint32_t u : part.unit) ++count[u];
  part.unit_begin.resize(J + 1);
  part.unit_begin[0] = 0;
  for (std::size_t j = 1; j <= J; ++j)
    part.unit_begin[j] = part.unit_begin[j - 1] + count[j];
  std::vector<std::uint32_t> cursor(part.unit_begin.begin(),
                                    part.unit_begin.end() - 1);
  part.order.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint32_t j = part.unit[i];
    part.order[cursor[j - 1]++] = std::uint32_t(i);
  }
  return part;
}

}  // namespace

UnitPartition partition_units(const PointCloud& map, const Trajectory& anchors,
                              int threads) {
  return partition_impl(map, anchors, threads, true);
}

UnitPartition partition_units_serial(const PointCloud& map,
                                     const Trajectory& anchors) {
  return partition_impl(map, anchors, 0, false);
}

PointCloud apply_partition_order(const PointCloud& cloud,
                                 const UnitPartition& part) {
  if (part.order.size() != cloud.size())
    throw std::invalid_argument("partition does not match cloud");
  PointCloud out;
  out.frame = cloud.frame;
  out.points.resize(cloud.size());
  bool colored = cloud.has_color_channel();
  if (colored) out.colors.resize(cloud.size());
  for (std::size_t p = 0; p < cloud.size(); ++p) {
    std::uint32_t src = part.order[p];
    out.points[p] = cloud.points[src];
    if (colored) out.colors[p] = cloud.colors[src];
  }
  return out;
}

Trajectory scale_trajectory(const Trajectory& traj,
                            const ScalingFactors& factors) {
  Trajectory out = traj;
  for (TrajectorySample& s : out.samples) {
    s.position.x *= factors.f_h;
    s.position.y *= factors.f_h;
    s.position.z *= factors.f_e;
  }
  return out;
}

namespace {

PointCloud correct_impl(const PointCloud& map, const UnitPartition& part,
                        const Trajectory& anchors,
                        const Trajectory& anchors_scaled, double sign,
                        int threads, bool parallel) {
  if (part.unit.size() != map.size() || part.order.size() != map.size())
    throw std::invalid_argument("partition does not match cloud");
  const std::size_t J = part.unit_count();
  if (anchors.samples.size() != J || anchors_scaled.samples.size() != J)
    throw std::invalid_argument("anchor count does not match partition");
  if (sign != 1.0 && sign != -1.0)
    throw std::invalid_argument("sign must be 1 or -1");
  std::vector<Point3> delta(J);
  for (std::size_t j = 0; j < J; ++j)
    delta[j] = (anchors_scaled.samples[j].position -
                anchors.samples[j].position) *
               sign;
  const std::size_t n = map.size();
  PointCloud out;
  out.frame = map.frame;
  out.points.resize(n);
  bool colored = map.has_color_channel();
  if (colored) out.colors.resize(n);
  auto one = [&](std::size_t p) {
    std::uint32_t src = part.order[p];
    out.points[p] = map.points[src] + delta[part.unit[src] - 1];
    if (colored) out.colors[p] = map.colors[src];
  };
  if (parallel) {
    int nt = effective_threads(threads);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nt)
#endif
    for (long long p = 0; p < (long long)n; ++p) one(std::size_t(p));
    (void)nt;
  } else {
    for (std::size_t p = 0; p < n; ++p) one(p);
  }
  return out;
}

}  // namespace

PointCloud correct_map(const PointCloud& map, const UnitPartition& part,
                       const Trajectory& anchors,
                       const Trajectory& anchors_scaled, double sign,
                       int threads) {
  return correct_impl(map, part, anchors, anchors_scaled, sign, threads, true);
}

PointCloud correct_map_serial(const PointCloud& map, const UnitPartition& part,
                              const Trajectory& anchors,
                              const Trajectory& anchors_scaled, double sign) {
  return correct_impl(map, part, anchors, anchors_scaled, sign, 0, false);
}

CorrectionResult correct_full(const PointCloud& map, const Trajectory& traj,
                              const std::vector<io::BarometerSample>& baro,
                              const io::DomRaster& dom,
                              const config::Config& cfg,
                              bool allow_nonconverged, int threads) {
  config::validate(cfg);
  ChannelMask mask = segment_channel(dom, cfg.segment_window, cfg.segment_bias,
                                     cfg.segment_invert, threads);
  double cl_spacing = std::max(dom.cell, cfg.densify_spacing);
  Centerline line = fit_centerline(mask, cl_spacing);

  CorrectionResult res;
  res.match = best_fragment(traj, line);
  res.fh = estimate_fh(traj, res.match.fragment);
  if (!res.fh.converged && !allow_nonconverged)
    throw NumericError("scale estimation did not converge");
  double fe = estimate_fe(traj, baro, cfg.p0);
  if (!(res.fh.f_h > 0.0)) throw NumericError("estimated f_h not positive");
  if (!(fe > 0.0)) throw NumericError("estimated f_e not positive");
  res.factors = ScalingFactors{res.fh.f_h, fe};

  res.densified = smooth_densify(traj, cfg.smooth_window, cfg.densify_spacing);
  Trajectory flat = project_horizontal(res.densified);
  res.partition = partition_units(map, flat, threads);
  res.densified_scaled = scale_trajectory(res.densified, res.factors);
  res.corrected_map =
      correct_map(map, res.partition, res.densified, res.densified_scaled,
                  cfg.correction_sign, threads);
  res.corrected_trajectory = scale_trajectory(traj, res.factors);
  return res;
}

}  // namespace gully::drift
