#include "gullypost/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gullypost/polyline.hpp"
#include "json.hpp"

namespace gully::synth {
namespace {

constexpr double kGradient = 0.1;        // channel bed slope, m per m
constexpr double kBaseElevation = 1200.0;
constexpr double kDomMargin = 10.0;      // m of bank around the mapped reach
constexpr double kShoulder = 2.0;        // flat rim strip kept in the map, m
constexpr int kChannelTone = 60;
constexpr int kBankTone = 200;

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
    double u1 = 1.0 - unit();
    double u2 = unit();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

void check_scene(const SceneParams& p) {
  if (!(p.length > 0.0) || !(p.depth > 0.0) || !(p.floor_width > 0.0) ||
      !(p.wall_slope_deg > 0.0) || !(p.wall_slope_deg < 90.0) ||
      !(p.sin_amplitude >= 0.0) || !(p.sin_wavelength > 0.0) ||
      !(p.density > 0.0) || !(p.traj_spacing > 0.0) || !(p.dom_cell > 0.0)) {
    throw std::invalid_argument("scene parameters out of range");
  }
}

double elevation(const SceneParams& p, double x, double v) {
  double tan_slope = std::tan(p.wall_slope_deg * std::numbers::pi / 180.0);
  double rise = std::max(0.0, (std::abs(v) - p.floor_width / 2.0) * tan_slope);
  return kBaseElevation - kGradient * x - p.depth + std::min(p.depth, rise);
}

std::size_t nearest_in_time(const Trajectory& traj, double t) {
  auto it = std::lower_bound(
      traj.begin(), traj.end(), t,
      [](const TrajectorySample& s, double value) { return s.t < value; });
  if (it == traj.begin()) return 0;
  if (it == traj.end()) return traj.size() - 1;
  std::size_t hi = std::size_t(it - traj.begin());
  std::size_t lo = hi - 1;
  return (t - traj[lo].t <= traj[hi].t - t) ? lo : hi;
}

}  // namespace

double centerline_y(const SceneParams& params, double x) {
  return params.sin_amplitude *
         std::sin(2.0 * std::numbers::pi * x / params.sin_wavelength);
}

double rim_half_width(const SceneParams& params) {
  double tan_slope =
      std::tan(params.wall_slope_deg * std::numbers::pi / 180.0);
  return params.floor_width / 2.0 + params.depth / tan_slope;
}

Scene gen_scene(const SceneParams& params) {
  check_scene(params);
  Scene scene;
  double rim_half = rim_half_width(params);
  double half_total = rim_half + kShoulder;

  Rng rng(params.seed);
  auto count = std::llround(params.density * params.length * 2.0 * half_total);
  scene.map.frame = "truth";
  scene.map.points.reserve(std::size_t(count));
  for (long long i = 0; i < count; ++i) {
    double x = rng.unit() * params.length;
    double v = (rng.unit() - 0.5) * 2.0 * half_total;
    scene.map.points.push_back(
        {x, centerline_y(params, x) + v, elevation(params, x, v)});
  }

  std::size_t dense_n = std::max<std::size_t>(
      1001, std::size_t(8.0 * params.length / params.traj_spacing) + 1);
  std::vector<Point3> thalweg(dense_n);
  for (std::size_t i = 0; i < dense_n; ++i) {
    double x = params.length * double(i) / double(dense_n - 1);
    thalweg[i] = {x, centerline_y(params, x), elevation(params, x, 0.0)};
  }
  auto cum = cumulative_arc(thalweg);
  double total = cum.back();
  std::vector<double> arcs;
  for (std::size_t k = 0; double(k) * params.traj_spacing < total; ++k) {
    arcs.push_back(double(k) * params.traj_spacing);
  }
  if (arcs.empty() || total - arcs.back() > 1e-12) arcs.push_back(total);
  scene.traj.reserve(arcs.size());
  for (double arc : arcs) {
    scene.traj.push_back({arc, point_at_arc(thalweg, cum, arc)});
  }

  scene.baro.reserve(scene.traj.size());
  for (const auto& s : scene.traj) {
    scene.baro.push_back({s.t, isa_pressure(s.position.z)});
  }

  double x0 = -kDomMargin;
  double x1 = params.length + kDomMargin;
  double y1 = params.sin_amplitude + rim_half + kDomMargin;
  double y0 = -y1;
  scene.dom.cell = params.dom_cell;
  scene.dom.width = int(std::ceil((x1 - x0) / params.dom_cell));
  scene.dom.height = int(std::ceil((y1 - y0) / params.dom_cell));
  scene.dom.origin_x = x0 + params.dom_cell / 2.0;
  scene.dom.origin_y = y1 - params.dom_cell / 2.0;
  scene.dom.values.resize(std::size_t(scene.dom.width) * scene.dom.height);
  for (int row = 0; row < scene.dom.height; ++row) {
    for (int col = 0; col < scene.dom.width; ++col) {
      double cx = scene.dom.center_x(col);
      double cy = scene.dom.center_y(row);
      bool channel = std::abs(cy - centerline_y(params, cx)) <= rim_half;
      scene.dom.values[std::size_t(row) * scene.dom.width + col] =
          std::uint8_t(channel ? kChannelTone : kBankTone);
    }
  }
  return scene;
}

Drifted inject_drift(const PointCloud& map, const Trajectory& traj,
                     const DriftParams& params, std::uint64_t seed) {
  if (!(params.true_fh > 0.0) || !(params.true_fe > 0.0)) {
    throw std::invalid_argument("scale factors must be positive");
  }
  if (params.point_noise < 0.0 || params.wobble_amplitude < 0.0 ||
      params.baro_noise < 0.0) {
    throw std::invalid_argument("noise parameters must be non-negative");
  }
  if (params.wobble_amplitude > 0.0 && !(params.wobble_wavelength > 0.0)) {
    throw std::invalid_argument("wobble wavelength must be positive");
  }

  Drifted out;
  out.map.frame = "drifted";
  out.map.colors = map.colors;
  out.map.points.reserve(map.size());
  Rng rng(seed);
  for (const auto& p : map.points) {
    Point3 q{p.x / params.true_fh, p.y / params.true_fh, p.z / params.true_fe};
    if (params.point_noise > 0.0) {
      q.x += rng.gauss() * params.point_noise;
      q.y += rng.gauss() * params.point_noise;
      q.z += rng.gauss() * params.point_noise;
    }
    out.map.points.push_back(q);
  }

  out.traj.reserve(traj.size());
  for (const auto& s : traj) {
    Point3 q{s.position.x / params.true_fh, s.position.y / params.true_fh,
             s.position.z / params.true_fe};
    if (params.wobble_amplitude > 0.0) {
      double w = 2.0 * std::numbers::pi * s.t / params.wobble_wavelength;
      q.x += params.wobble_amplitude * std::sin(w);
      q.y += params.wobble_amplitude *
             std::sin(w + 2.0 * std::numbers::pi / 3.0);
      q.z += params.wobble_amplitude *
             std::sin(w + 4.0 * std::numbers::pi / 3.0);
    }
    out.traj.push_back({s.t, q});
  }
  return out;
}

double isa_pressure(double altitude, double p0) {
  if (!(p0 > 0.0)) throw std::invalid_argument("p0 must be positive");
  return p0 * std::pow(1.0 - altitude / 44330.0, 1.0 / 0.190295);
}

AccuracyReport evaluate(const Trajectory& corrected,
                        const std::vector<std::pair<double, double>>& benchmark,
                        const Point3& start, const Point3& end,
                        double reference_displacement,
                        double reference_distance) {
  (void)start;
  if (corrected.empty()) throw std::invalid_argument("empty trajectory");
  if (benchmark.empty()) throw std::invalid_argument("empty benchmark");
  if (!(reference_displacement > 0.0) || !(reference_distance > 0.0)) {
    throw std::invalid_argument("reference values must be positive");
  }
  double overlap_lo = std::max(corrected.front().t, benchmark.front().first);
  double overlap_hi = std::min(corrected.back().t, benchmark.back().first);
  if (overlap_lo > overlap_hi) throw NumericError("empty time overlap");

  double sum = 0.0;
  double sum_sq = 0.0;
  for (const auto& [t, z] : benchmark) {
    double diff = corrected[nearest_in_time(corrected, t)].position.z - z;
    sum += diff;
    sum_sq += diff * diff;
  }
  AccuracyReport report;
  report.elevation_bias = sum / double(benchmark.size());
  report.elevation_rmse = std::sqrt(sum_sq / double(benchmark.size()));
  const Point3& last = corrected.back().position;
  report.endpoint_bias = std::hypot(last.x - end.x, last.y - end.y);
  report.displacement_error_pct =
      100.0 * report.endpoint_bias / reference_displacement;
  report.distance_error_pct = 100.0 * report.endpoint_bias / reference_distance;
  return report;
}

void write_scene_bundle(const std::string& dir, const SceneParams& scene,
                        const DriftParams& drift, std::uint64_t drift_seed) {
  std::filesystem::create_directories(dir);
  Scene truth = gen_scene(scene);
  Drifted drifted = inject_drift(truth.map, truth.traj, drift, drift_seed);

  io::write_point_cloud(drifted.map, dir + "/map.ply");
  io::write_trajectory_csv(drifted.traj, dir + "/trajectory.csv");
  io::write_dom_pgm(truth.dom, dir + "/dom.pgm");

  auto baro = truth.baro;
  if (drift.baro_noise > 0.0) {
    Rng rng(drift_seed + 1);
    for (auto& sample : baro) {
      sample.pressure =
          std::max(1.0, sample.pressure + rng.gauss() * drift.baro_noise);
    }
  }
  io::write_barometer_csv(baro, dir + "/baro.csv");

  const Point3& start = truth.traj.front().position;
  const Point3& end = truth.traj.back().position;
  double displacement = std::hypot(end.x - start.x, end.y - start.y);
  double distance = 0.0;
  for (std::size_t i = 1; i < truth.traj.size(); ++i) {
    distance += std::hypot(
        truth.traj[i].position.x - truth.traj[i - 1].position.x,
        truth.traj[i].position.y - truth.traj[i - 1].position.y);
  }
  nlohmann::json j;
  j["true_fh"] = drift.true_fh;
  j["true_fe"] = drift.true_fe;
  j["start_x"] = start.x;
  j["start_y"] = start.y;
  j["end_x"] = end.x;
  j["end_y"] = end.y;
  j["reference_displacement"] = displacement;
  j["reference_distance"] = distance;
  std::string path = dir + "/truth.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << j.dump(2) << '\n';
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace gully::synth
