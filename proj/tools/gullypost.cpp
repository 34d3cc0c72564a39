#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gullypost/analysis.hpp"
#include "gullypost/config.hpp"
#include "gullypost/drift.hpp"
#include "gullypost/io.hpp"
#include "gullypost/knn.hpp"
#include "gullypost/section.hpp"
#include "gullypost/smoothing.hpp"
#include "gullypost/synth.hpp"
#include "gullypost/types.hpp"

namespace {

using namespace gully;

constexpr const char* kVersion = "1.0.0";

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> overrides;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("--config", c.config_path, "configuration file");
  cmd->add_option("--set", c.overrides,
                  "override one config key, as key=value (repeatable)");
  cmd->add_option("--threads", c.threads, "worker threads, 0 = all");
}

config::Config make_config(const CommonOpts& c) {
  config::Config cfg = config::resolve_config(c.config_path);
  for (const std::string& kv : c.overrides) {
    std::size_t eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("expected key=value in --set");
    config::set_key(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  config::validate(cfg);
  return cfg;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out.write(content.data(), std::streamsize(content.size()));
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
  return buf;
}

void write_manifest(const std::string& path, nlohmann::json j) {
  j["version"] = kVersion;
  write_text_file(path, j.dump(2) + "\n");
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw gully::ParseError(path, 0, "cannot open file");
  try {
    nlohmann::json j;
    in >> j;
    return j;
  } catch (const nlohmann::json::exception&) {
    throw gully::ParseError(path, 0, "invalid JSON");
  }
}

double need_number(const nlohmann::json& j, const std::string& key,
                   const std::string& path) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw gully::ParseError(path, 0, "missing numeric key '" + key + "'");
  return j.at(key).get<double>();
}

std::vector<std::size_t> choose_stations(std::size_t n, int span, int count) {
  if (count < 1) throw std::invalid_argument("stations must be positive");
  std::size_t s = std::size_t(span);
  if (n < 2 * s + 1)
    throw std::invalid_argument("trajectory too short for sections");
  std::size_t lo = s;
  std::size_t hi = n - 1 - s;
  std::vector<std::size_t> out;
  if (count == 1) {
    out.push_back((lo + hi) / 2);
    return out;
  }
  for (int k = 0; k < count; ++k) {
    double f = double(k) / double(count - 1);
    std::size_t j = lo + std::size_t(std::llround(f * double(hi - lo)));
    if (out.empty() || out.back() != j) out.push_back(j);
  }
  return out;
}

// Shared by `section` and `pipeline`: cut, classify, reconstruct, and write
// one profile per chosen station. Stations whose fused slice is too small
// for the smoothing neighbourhood are skipped with a note.
std::vector<std::string> emit_sections(const PointCloud& grouped,
                                       const drift::UnitPartition& part,
                                       const Trajectory& stations,
                                       const config::Config& cfg, int count,
                                       const std::string& dir) {
  std::filesystem::create_directories(dir);
  auto picks = choose_stations(stations.size(), cfg.section_normal_span, count);
  std::size_t min_points = std::max<std::size_t>(
      std::size_t(2 * cfg.voxel_half + 1), std::size_t(cfg.density_k + 1));
  std::vector<std::string> written;
  std::size_t file_index = 0;
  for (std::size_t j : picks) {
    auto plane = section::station_plane(stations, j, cfg.section_normal_span);
    auto fused =
        section::fuse_units(grouped, part, j + 1, cfg.section_normal_span);
    if (fused.size() < min_points) {
      std::cerr << "note: station " << j << " skipped (" << fused.size()
                << " points)\n";
      continue;
    }
    auto projected =
        section::project_points(fused, plane, cfg.plane_denominator);
    auto charts = section::to_plane_coords(projected, plane);
    auto labels =
        section::classify_wall_ground(charts, cfg.section_slope_threshold);
    auto profile = section::reconstruct(charts, labels, cfg.voxel_half,
                                        cfg.density_k, cfg.section_spacing);
    char name[32];
    std::snprintf(name, sizeof name, "section_%04zu.csv", file_index++);
    section::write_section_csv(profile, plane, dir + "/" + name);
    written.push_back(name);
  }
  return written;
}

std::string accuracy_lines(const synth::AccuracyReport& r) {
  std::string s;
  s += "elevation_bias\t" + io::format_shortest(r.elevation_bias) + "\n";
  s += "elevation_rmse\t" + io::format_shortest(r.elevation_rmse) + "\n";
  s += "endpoint_bias\t" + io::format_shortest(r.endpoint_bias) + "\n";
  s += "displacement_error_pct\t" +
       io::format_shortest(r.displacement_error_pct) + "\n";
  s += "distance_error_pct\t" + io::format_shortest(r.distance_error_pct) +
       "\n";
  return s;
}

synth::AccuracyReport evaluate_bundle(const Trajectory& traj,
                                      const std::string& bundle,
                                      const config::Config& cfg) {
  auto baro = io::read_barometer_csv(bundle + "/baro.csv");
  std::string truth_path = bundle + "/truth.json";
  nlohmann::json truth = read_json(truth_path);
  std::vector<std::pair<double, double>> benchmark;
  benchmark.reserve(baro.size());
  for (const auto& b : baro) {
    benchmark.emplace_back(b.t, drift::pressure_to_altitude(b.pressure, cfg.p0));
  }
  Point3 start{need_number(truth, "start_x", truth_path),
               need_number(truth, "start_y", truth_path), 0.0};
  Point3 end{need_number(truth, "end_x", truth_path),
             need_number(truth, "end_y", truth_path), 0.0};
  return synth::evaluate(
      traj, benchmark, start, end,
      need_number(truth, "reference_displacement", truth_path),
      need_number(truth, "reference_distance", truth_path));
}

struct CorrectOpts {
  CommonOpts common;
  std::string map, traj, baro, dom, out_map, out_traj;
  bool force = false;
};

void run_correct(const CorrectOpts& o) {
  config::Config cfg = make_config(o.common);
  auto map = io::read_point_cloud(o.map);
  auto traj = io::read_trajectory_csv(o.traj);
  auto baro = io::read_barometer_csv(o.baro);
  auto dom = io::read_dom_pgm(o.dom);
  auto res = drift::correct_full(map, traj, baro, dom, cfg, o.force,
                                 o.common.threads);
  res.corrected_map.frame = "corrected";
  io::write_point_cloud(res.corrected_map, o.out_map);
  io::write_trajectory_csv(res.corrected_trajectory, o.out_traj);
  nlohmann::json m;
  m["command"] = "correct";
  m["config_hash"] = hash_hex(config::config_hash(cfg));
  m["converged"] = res.fh.converged;
  m["f_e"] = res.factors.f_e;
  m["f_h"] = res.factors.f_h;
  m["inputs"] = {{"barometer", o.baro},
                 {"dom", o.dom},
                 {"map", o.map},
                 {"trajectory", o.traj}};
  m["outputs"] = {{"map", o.out_map}, {"trajectory", o.out_traj}};
  write_manifest(o.out_map + ".manifest.json", m);
}

struct FilterOpts {
  CommonOpts common;
  std::string in, out;
};

void run_smooth(const FilterOpts& o) {
  config::Config cfg = make_config(o.common);
  auto cloud = io::read_point_cloud(o.in);
  auto smoothed =
      smoothing::smooth(cloud, cfg.voxel_half, cfg.density_k, o.common.threads);
  io::write_point_cloud(smoothed, o.out);
  nlohmann::json m;
  m["command"] = "smooth";
  m["config_hash"] = hash_hex(config::config_hash(cfg));
  m["inputs"] = {{"map", o.in}};
  m["outputs"] = {{"map", o.out}};
  write_manifest(o.out + ".manifest.json", m);
}

void run_recolor(const FilterOpts& o) {
  config::Config cfg = make_config(o.common);
  auto cloud = io::read_point_cloud(o.in);
  auto colored = analysis::recolor(cloud, cfg.recolor_k, cfg.recolor_radius,
                                   o.common.threads);
  io::write_point_cloud(colored, o.out);
  nlohmann::json m;
  m["command"] = "recolor";
  m["config_hash"] = hash_hex(config::config_hash(cfg));
  m["inputs"] = {{"map", o.in}};
  m["outputs"] = {{"map", o.out}};
  write_manifest(o.out + ".manifest.json", m);
}

void run_dem(const FilterOpts& o) {
  config::Config cfg = make_config(o.common);
  auto cloud = io::read_point_cloud(o.in);
  auto dem = analysis::rasterize_dem(cloud, cfg.dem_cell, cfg.dem_quantum,
                                     o.common.threads);
  io::write_dem_asc(dem, o.out);
  nlohmann::json m;
  m["command"] = "dem";
  m["config_hash"] = hash_hex(config::config_hash(cfg));
  m["inputs"] = {{"map", o.in}};
  m["outputs"] = {{"dem", o.out}};
  write_manifest(o.out + ".manifest.json", m);
}

struct SectionOpts {
  CommonOpts common;
  std::string map, traj, out_dir;
  int stations = 10;
};

void run_section(const SectionOpts& o) {
  config::Config cfg = make_config(o.common);
  auto cloud = io::read_point_cloud(o.map);
  auto traj = io::read_trajectory_csv(o.traj);
  auto densified =
      drift::smooth_densify(traj, cfg.smooth_window, cfg.densify_spacing);
  auto anchors = drift::project_horizontal(densified);
  auto part = drift::partition_units(cloud, anchors, o.common.threads);
  auto grouped = drift::apply_partition_order(cloud, part);
  auto written =
      emit_sections(grouped, part, densified, cfg, o.stations, o.out_dir);
  nlohmann::json m;
  m["command"] = "section";
  m["config_hash"] = hash_hex(config::config_hash(cfg));
  m["inputs"] = {{"map", o.map}, {"trajectory", o.traj}};
  m["outputs"] = {{"sections", written}};
  write_manifest(o.out_dir + "/manifest.json", m);
}

struct VolumeOpts {
  CommonOpts common;
  std::vector<std::string> sections;
  double spacing = 0.0;
  double cap = 0.0;
  double cap_above = 0.0;
  bool has_cap = false;
  bool has_cap_above = false;
  std::vector<double> areas;
  std::vector<double> lengths;
  std::string out;
};

void run_volume(const VolumeOpts& o) {
  config::Config cfg = make_config(o.common);
  analysis::VolumeReport report;
  if (!o.sections.empty()) {
    if (!o.areas.empty() || !o.lengths.empty())
      throw std::invalid_argument(
          "--section cannot be combined with --area/--length");
    if (!(o.spacing > 0.0))
      throw std::invalid_argument("--spacing must be positive");
    if (o.has_cap == o.has_cap_above)
      throw std::invalid_argument(
          "exactly one of --cap or --cap-above is required");
    report.method = "sections";
    std::vector<double> areas;
    areas.reserve(o.sections.size());
    for (const std::string& path : o.sections) {
      auto sf = section::read_section_csv(path);
      if (sf.profile.empty())
        throw std::invalid_argument("empty section profile: " + path);
      double cap = o.cap;
      if (o.has_cap_above) {
        double lowest = sf.profile.front().h;
        for (const auto& p : sf.profile) lowest = std::min(lowest, p.h);
        cap = lowest + o.cap_above;
      }
      areas.push_back(section::section_area(sf.profile, cap));
    }
    report.volume = analysis::deposit_volume_sections(areas, o.spacing);
    for (std::size_t i = 0; i + 1 < areas.size(); ++i) {
      char label[16];
      std::snprintf(label, sizeof label, "slab_%02zu", i);
      report.components.emplace_back(
          label, o.spacing * (areas[i] + areas[i + 1]) / 2.0);
    }
  } else {
    if (o.areas.empty() || o.areas.size() != o.lengths.size())
      throw std::invalid_argument(
          "--area and --length must be given the same number of times");
    report.method = "prisms";
    for (std::size_t i = 0; i < o.areas.size(); ++i) {
      if (!(o.areas[i] >= 0.0))
        throw std::invalid_argument("negative prism area");
      if (!(o.lengths[i] > 0.0))
        throw std::invalid_argument("prism length must be positive");
      char label[16];
      std::snprintf(label, sizeof label, "prism_%02zu", i);
      double v = o.areas[i] * o.lengths[i];
      report.components.emplace_back(label, v);
      report.volume += v;
    }
  }
  std::string text = analysis::format_volume_report(report);
  std::cout << text;
  if (!o.out.empty()) {
    write_text_file(o.out, text);
    nlohmann::json m;
    m["command"] = "volume";
    m["config_hash"] = hash_hex(config::config_hash(cfg));
    m["inputs"] = {{"sections", o.sections}};
    m["outputs"] = {{"report", o.out}};
    write_manifest(o.out + ".manifest.json", m);
  }
}

struct DiffOpts {
  CommonOpts common;
  std::string a, b, out;
};

void run_diff(const DiffOpts& o) {
  config::Config cfg = make_config(o.common);
  auto a = io::read_dem_asc(o.a);
  auto b = io::read_dem_asc(o.b);
  auto res = analysis::dem_diff(a, b);
  analysis::VolumeReport report;
  report.method = "dem_diff";
  report.volume = res.net;
  report.components.emplace_back("cut", res.cut);
  report.components.emplace_back("fill", res.fill);
  std::cout << analysis::format_volume_report(report);
  if (!o.out.empty()) {
    io::write_dem_asc(res.diff, o.out);
    nlohmann::json m;
    m["command"] = "diff";
    m["config_hash"] = hash_hex(config::config_hash(cfg));
    m["inputs"] = {{"a", o.a}, {"b", o.b}};
    m["outputs"] = {{"diff", o.out}};
    write_manifest(o.out + ".manifest.json", m);
  }
}

struct SynthOpts {
  CommonOpts common;
  std::string out_dir;
  synth::SceneParams scene;
  synth::DriftParams drift;
  std::uint64_t drift_seed = 1;
};

void run_synth(const SynthOpts& o) {
  synth::write_scene_bundle(o.out_dir, o.scene, o.drift, o.drift_seed);
  nlohmann::json m;
  m["command"] = "synth";
  m["inputs"] = {{"baro_noise", o.drift.baro_noise},
                 {"density", o.scene.density},
                 {"depth", o.scene.depth},
                 {"dom_cell", o.scene.dom_cell},
                 {"drift_seed", o.drift_seed},
                 {"floor_width", o.scene.floor_width},
                 {"length", o.scene.length},
                 {"point_noise", o.drift.point_noise},
                 {"seed", o.scene.seed},
                 {"sin_amplitude", o.scene.sin_amplitude},
                 {"sin_wavelength", o.scene.sin_wavelength},
                 {"traj_spacing", o.scene.traj_spacing},
                 {"true_fe", o.drift.true_fe},
                 {"true_fh", o.drift.true_fh},
                 {"wall_slope_deg", o.scene.wall_slope_deg},
                 {"wobble_amplitude", o.drift.wobble_amplitude},
                 {"wobble_wavelength", o.drift.wobble_wavelength}};
  m["outputs"] = {{"bundle", o.out_dir}};
  write_manifest(o.out_dir + "/manifest.json", m);
}

struct EvalOpts {
  CommonOpts common;
  std::string traj, bundle, out;
};

void run_eval(const EvalOpts& o) {
  config::Config cfg = make_config(o.common);
  auto traj = io::read_trajectory_csv(o.traj);
  auto report = evaluate_bundle(traj, o.bundle, cfg);
  std::string text = accuracy_lines(report);
  std::cout << text;
  if (!o.out.empty()) write_text_file(o.out, text);
}

struct PipelineOpts {
  CommonOpts common;
  std::string bundle, out_dir;
  int stations = 8;
  bool force = false;
};

void run_pipeline(const PipelineOpts& o) {
  config::Config cfg = make_config(o.common);
  auto map = io::read_point_cloud(o.bundle + "/map.ply");
  auto traj = io::read_trajectory_csv(o.bundle + "/trajectory.csv");
  auto baro = io::read_barometer_csv(o.bundle + "/baro.csv");
  auto dom = io::read_dom_pgm(o.bundle + "/dom.pgm");
  std::filesystem::create_directories(o.out_dir);

  auto res =
      drift::correct_full(map, traj, baro, dom, cfg, o.force, o.common.threads);
  res.corrected_map.frame = "corrected";
  io::write_point_cloud(res.corrected_map, o.out_dir + "/corrected_map.ply");
  io::write_trajectory_csv(res.corrected_trajectory,
                           o.out_dir + "/corrected_trajectory.csv");

  auto smoothed = smoothing::smooth(res.corrected_map, cfg.voxel_half,
                                    cfg.density_k, o.common.threads);
  io::write_point_cloud(smoothed, o.out_dir + "/smoothed_map.ply");

  auto dem = analysis::rasterize_dem(smoothed, cfg.dem_cell, cfg.dem_quantum,
                                     o.common.threads);
  io::write_dem_asc(dem, o.out_dir + "/dem.asc");

  auto written = emit_sections(res.corrected_map, res.partition,
                               res.densified_scaled, cfg, o.stations,
                               o.out_dir + "/sections");

  auto report = evaluate_bundle(res.corrected_trajectory, o.bundle, cfg);
  std::string text;
  text += "f_h\t" + io::format_shortest(res.factors.f_h) + "\n";
  text += "f_e\t" + io::format_shortest(res.factors.f_e) + "\n";
  text += accuracy_lines(report);
  text += "sections\t" + std::to_string(written.size()) + "\n";
  write_text_file(o.out_dir + "/report.txt", text);

  nlohmann::json m;
  m["command"] = "pipeline";
  m["config_hash"] = hash_hex(config::config_hash(cfg));
  m["converged"] = res.fh.converged;
  m["f_e"] = res.factors.f_e;
  m["f_h"] = res.factors.f_h;
  m["inputs"] = {{"bundle", o.bundle}};
  m["outputs"] = {{"dem", "dem.asc"},
                  {"map", "corrected_map.ply"},
                  {"report", "report.txt"},
                  {"sections", written},
                  {"smoothed_map", "smoothed_map.ply"},
                  {"trajectory", "corrected_trajectory.csv"}};
  write_manifest(o.out_dir + "/manifest.json", m);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Post-processing toolkit for handheld SLAM channel surveys"};
  app.require_subcommand(1);

  CorrectOpts correct;
  auto* c = app.add_subcommand(
      "correct", "estimate scaling factors and translate map units");
  c->add_option("--map", correct.map, "drifted map PLY")->required();
  c->add_option("--traj", correct.traj, "trajectory CSV")->required();
  c->add_option("--baro", correct.baro, "barometer CSV")->required();
  c->add_option("--dom", correct.dom, "orthophoto PGM (with world file)")
      ->required();
  c->add_option("--out-map", correct.out_map, "corrected map PLY")->required();
  c->add_option("--out-traj", correct.out_traj, "corrected trajectory CSV")
      ->required();
  c->add_flag("--force", correct.force,
              "use the best estimate even without convergence");
  add_common(c, correct.common);
  c->callback([&] { run_correct(correct); });

  FilterOpts smooth;
  auto* s = app.add_subcommand("smooth", "density-weighted map smoothing");
  s->add_option("--in", smooth.in, "input PLY")->required();
  s->add_option("--out", smooth.out, "output PLY")->required();
  add_common(s, smooth.common);
  s->callback([&] { run_smooth(smooth); });

  FilterOpts recolor;
  auto* r = app.add_subcommand("recolor",
                               "fill uncolored points from colored neighbours");
  r->add_option("--in", recolor.in, "input PLY")->required();
  r->add_option("--out", recolor.out, "output PLY")->required();
  add_common(r, recolor.common);
  r->callback([&] { run_recolor(recolor); });

  FilterOpts dem;
  auto* d = app.add_subcommand("dem", "rasterize a minimum-elevation grid");
  d->add_option("--in", dem.in, "input PLY")->required();
  d->add_option("--out", dem.out, "output ASC")->required();
  add_common(d, dem.common);
  d->callback([&] { run_dem(dem); });

  SectionOpts section_opts;
  auto* x = app.add_subcommand("section", "extract cross-section profiles");
  x->add_option("--map", section_opts.map, "corrected map PLY")->required();
  x->add_option("--traj", section_opts.traj, "corrected trajectory CSV")
      ->required();
  x->add_option("--out-dir", section_opts.out_dir, "section output directory")
      ->required();
  x->add_option("--stations", section_opts.stations,
                "number of evenly spaced stations");
  add_common(x, section_opts.common);
  x->callback([&] { run_section(section_opts); });

  VolumeOpts volume;
  auto* v = app.add_subcommand("volume", "deposit volume estimation");
  v->add_option("--section", volume.sections,
                "section CSV, in downstream order (repeatable)");
  v->add_option("--spacing", volume.spacing, "station spacing, m");
  v->add_option("--cap", volume.cap, "cap elevation in the section chart, m");
  v->add_option("--cap-above", volume.cap_above,
                "cap height above each profile's lowest point, m");
  v->add_option("--area", volume.areas, "prism base area, m2 (repeatable)");
  v->add_option("--length", volume.lengths, "prism length, m (repeatable)");
  v->add_option("--out", volume.out, "write the report here too");
  add_common(v, volume.common);
  v->callback([&] {
    volume.has_cap = v->count("--cap") > 0;
    volume.has_cap_above = v->count("--cap-above") > 0;
    run_volume(volume);
  });

  DiffOpts diff;
  auto* f = app.add_subcommand("diff", "change between two elevation grids");
  f->add_option("--a", diff.a, "earlier DEM ASC")->required();
  f->add_option("--b", diff.b, "later DEM ASC")->required();
  f->add_option("--out", diff.out, "write the difference grid here");
  add_common(f, diff.common);
  f->callback([&] { run_diff(diff); });

  SynthOpts synthopt;
  auto* g = app.add_subcommand("synth", "generate a synthetic survey bundle");
  g->add_option("--out-dir", synthopt.out_dir, "bundle directory")->required();
  g->add_option("--length", synthopt.scene.length, "channel length, m");
  g->add_option("--depth", synthopt.scene.depth, "channel depth, m");
  g->add_option("--floor-width", synthopt.scene.floor_width, "floor width, m");
  g->add_option("--wall-slope", synthopt.scene.wall_slope_deg,
                "wall slope, deg");
  g->add_option("--amplitude", synthopt.scene.sin_amplitude,
                "centerline amplitude, m");
  g->add_option("--wavelength", synthopt.scene.sin_wavelength,
                "centerline wavelength, m");
  g->add_option("--point-density", synthopt.scene.density, "points per m2");
  g->add_option("--traj-spacing", synthopt.scene.traj_spacing,
                "trajectory sample spacing, m");
  g->add_option("--dom-cell", synthopt.scene.dom_cell, "orthophoto cell, m");
  g->add_option("--seed", synthopt.scene.seed, "scene seed");
  g->add_option("--fh", synthopt.drift.true_fh, "injected horizontal factor");
  g->add_option("--fe", synthopt.drift.true_fe, "injected elevation factor");
  g->add_option("--point-noise", synthopt.drift.point_noise,
                "map noise sigma, m");
  g->add_option("--wobble-amplitude", synthopt.drift.wobble_amplitude,
                "trajectory wobble, m");
  g->add_option("--wobble-wavelength", synthopt.drift.wobble_wavelength,
                "wobble wavelength, s");
  g->add_option("--baro-noise", synthopt.drift.baro_noise,
                "barometer noise sigma, Pa");
  g->add_option("--drift-seed", synthopt.drift_seed, "drift noise seed");
  add_common(g, synthopt.common);
  g->callback([&] { run_synth(synthopt); });

  EvalOpts evalopt;
  auto* e = app.add_subcommand("eval", "accuracy report against a bundle");
  e->add_option("--traj", evalopt.traj, "corrected trajectory CSV")->required();
  e->add_option("--bundle", evalopt.bundle, "bundle with truth.json, baro.csv")
      ->required();
  e->add_option("--out", evalopt.out, "write the report here too");
  add_common(e, evalopt.common);
  e->callback([&] { run_eval(evalopt); });

  PipelineOpts pipe;
  auto* p = app.add_subcommand("pipeline", "correct, smooth, export, evaluate");
  p->add_option("--bundle", pipe.bundle, "input bundle directory")->required();
  p->add_option("--out-dir", pipe.out_dir, "output directory")->required();
  p->add_option("--stations", pipe.stations, "number of cross-sections");
  p->add_flag("--force", pipe.force,
              "use the best estimate even without convergence");
  add_common(p, pipe.common);
  p->callback([&] { run_pipeline(pipe); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    std::cerr << "error: " << err.what() << '\n' << app.help();
    return 1;
  } catch (const gully::ParseError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  } catch (const gully::NumericError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 3;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
  return 0;
}
