#include "gullypost/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gullypost/io.hpp"

namespace gully::config {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& v, const std::string& path, int line) {
  const char* b = v.data();
  const char* e = b + v.size();
  if (b != e && *b == '+') ++b;
  double out = 0.0;
  auto r = std::from_chars(b, e, out);
  if (b == e || r.ec != std::errc() || r.ptr != e || !std::isfinite(out))
    throw ParseError(path, line, "invalid number '" + v + "'");
  return out;
}

int parse_int(const std::string& v, const std::string& path, int line) {
  const char* b = v.data();
  const char* e = b + v.size();
  if (b != e && *b == '+') ++b;
  int out = 0;
  auto r = std::from_chars(b, e, out);
  if (b == e || r.ec != std::errc() || r.ptr != e)
    throw ParseError(path, line, "invalid integer '" + v + "'");
  return out;
}

bool parse_bool(const std::string& v, const std::string& path, int line) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ParseError(path, line, "invalid boolean '" + v + "'");
}

void apply(Config& cfg, const std::string& key, const std::string& value,
           const std::string& path, int line) {
  if (key == "p0") cfg.p0 = parse_double(value, path, line);
  else if (key == "smooth_window") cfg.smooth_window = parse_int(value, path, line);
  else if (key == "densify_spacing") cfg.densify_spacing = parse_double(value, path, line);
  else if (key == "voxel_half") cfg.voxel_half = parse_int(value, path, line);
  else if (key == "density_k") cfg.density_k = parse_int(value, path, line);
  else if (key == "section_normal_span") cfg.section_normal_span = parse_int(value, path, line);
  else if (key == "section_spacing") cfg.section_spacing = parse_double(value, path, line);
  else if (key == "section_slope_threshold") cfg.section_slope_threshold = parse_double(value, path, line);
  else if (key == "recolor_k") cfg.recolor_k = parse_int(value, path, line);
  else if (key == "recolor_radius") cfg.recolor_radius = parse_double(value, path, line);
  else if (key == "dem_cell") cfg.dem_cell = parse_double(value, path, line);
  else if (key == "dem_quantum") cfg.dem_quantum = parse_double(value, path, line);
  else if (key == "correction_sign") cfg.correction_sign = parse_double(value, path, line);
  else if (key == "plane_denominator") {
    if (value == "squared") cfg.plane_denominator = PlaneDenominator::squared;
    else if (value == "literal") cfg.plane_denominator = PlaneDenominator::literal;
    else throw ParseError(path, line, "plane_denominator must be 'squared' or 'literal'");
  }
  else if (key == "segment_window") cfg.segment_window = parse_int(value, path, line);
  else if (key == "segment_bias") cfg.segment_bias = parse_double(value, path, line);
  else if (key == "segment_invert") cfg.segment_invert = parse_bool(value, path, line);
  else throw ParseError(path, line, "unknown config key '" + key + "'");
}

}  // namespace

void validate(const Config& cfg) {
  auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (!(cfg.p0 > 0)) fail("p0 must be positive");
  if (cfg.smooth_window < 1 || cfg.smooth_window % 2 == 0)
    fail("smooth_window must be odd and positive");
  if (!(cfg.densify_spacing > 0)) fail("densify_spacing must be positive");
  if (cfg.voxel_half < 0) fail("voxel_half must be non-negative");
  if (cfg.density_k < 1) fail("density_k must be positive");
  if (cfg.section_normal_span < 1) fail("section_normal_span must be positive");
  if (!(cfg.section_spacing > 0)) fail("section_spacing must be positive");
  if (!(cfg.section_slope_threshold > 0))
    fail("section_slope_threshold must be positive");
  if (cfg.recolor_k < 1) fail("recolor_k must be positive");
  if (!(cfg.recolor_radius > 0)) fail("recolor_radius must be positive");
  if (!(cfg.dem_cell > 0)) fail("dem_cell must be positive");
  if (!(cfg.dem_quantum > 0)) fail("dem_quantum must be positive");
  if (cfg.correction_sign != 1.0 && cfg.correction_sign != -1.0)
    fail("correction_sign must be 1 or -1");
  if (cfg.segment_window < 1 || cfg.segment_window % 2 == 0)
    fail("segment_window must be odd and positive");
  if (!(cfg.segment_bias >= 0.0 && cfg.segment_bias < 1.0))
    fail("segment_bias must be in [0, 1)");
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  Config cfg;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    if (!s.empty() && s.back() == '\r') s.pop_back();
    std::size_t hash = s.find('#');
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ParseError(path, line, "expected key = value");
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ParseError(path, line, "expected key = value");
    apply(cfg, key, value, path, line);
  }
  validate(cfg);
  return cfg;
}

Config resolve_config(const std::string& cli_path) {
  if (!cli_path.empty()) return load_config(cli_path);
  const char* env = std::getenv("GULLYPOST_CONFIG");
  if (env != nullptr && *env != '\0') return load_config(env);
  return Config{};
}

void set_key(Config& cfg, const std::string& key, const std::string& value) {
  std::string k = trim(key);
  std::string v = trim(value);
  if (k.empty() || v.empty())
    throw std::invalid_argument("expected key=value override");
  try {
    apply(cfg, k, v, "<override>", 0);
  } catch (const ParseError& e) {
    throw std::invalid_argument(e.what());
  }
}

std::string canonical_dump(const Config& cfg) {
  auto d = [](double v) { return io::format_shortest(v); };
  std::vector<std::pair<std::string, std::string>> kv = {
      {"p0", d(cfg.p0)},
      {"smooth_window", std::to_string(cfg.smooth_window)},
      {"densify_spacing", d(cfg.densify_spacing)},
      {"voxel_half", std::to_string(cfg.voxel_half)},
      {"density_k", std::to_string(cfg.density_k)},
      {"section_normal_span", std::to_string(cfg.section_normal_span)},
      {"section_spacing", d(cfg.section_spacing)},
      {"section_slope_threshold", d(cfg.section_slope_threshold)},
      {"recolor_k", std::to_string(cfg.recolor_k)},
      {"recolor_radius", d(cfg.recolor_radius)},
      {"dem_cell", d(cfg.dem_cell)},
      {"dem_quantum", d(cfg.dem_quantum)},
      {"correction_sign", d(cfg.correction_sign)},
      {"plane_denominator",
       cfg.plane_denominator == PlaneDenominator::squared ? "squared"
                                                          : "literal"},
      {"segment_window", std::to_string(cfg.segment_window)},
      {"segment_bias", d(cfg.segment_bias)},
      {"segment_invert", cfg.segment_invert ? "true" : "false"},
  };
  std::sort(kv.begin(), kv.end());
  std::string out;
  for (const auto& [k, v] : kv) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  return out;
}

std::uint64_t config_hash(const Config& cfg) {
  std::string dump = canonical_dump(cfg);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace gully::config
