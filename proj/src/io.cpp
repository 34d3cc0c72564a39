#include "gullypost/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>

namespace gully::io {
namespace {

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::vector<std::string> split_char(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t end = s.find(sep, start);
    if (end == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, end - start));
    start = end + 1;
  }
}

double parse_double(const std::string& tok, const std::string& path, int line) {
  const char* b = tok.data();
  const char* e = b + tok.size();
  if (b != e && *b == '+') ++b;
  double v = 0.0;
  auto r = std::from_chars(b, e, v);
  if (b == e || r.ec != std::errc() || r.ptr != e)
    throw ParseError(path, line, "invalid number '" + tok + "'");
  return v;
}

long parse_long(const std::string& tok, const std::string& path, int line) {
  const char* b = tok.data();
  const char* e = b + tok.size();
  if (b != e && *b == '+') ++b;
  long v = 0;
  auto r = std::from_chars(b, e, v);
  if (b == e || r.ec != std::errc() || r.ptr != e)
    throw ParseError(path, line, "invalid integer '" + tok + "'");
  return v;
}

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string f1(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  return out;
}

void finish_out(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string world_path_for(const std::string& path) {
  std::size_t slash = path.find_last_of("/\\");
  std::size_t dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return path + ".wld";
  return path.substr(0, dot) + ".wld";
}

}  // namespace

std::string format_shortest(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

PointCloud read_point_cloud(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  int line = 0;
  std::string raw;
  auto next_line = [&](std::string& out) {
    if (!std::getline(in, raw)) return false;
    ++line;
    out = strip_cr(raw);
    return true;
  };

  std::string s;
  if (!next_line(s) || s != "ply")
    throw ParseError(path, line == 0 ? 1 : line, "expected 'ply' magic");
  if (!next_line(s) || s != "format ascii 1.0")
    throw ParseError(path, line, "expected 'format ascii 1.0'");

  PointCloud cloud;
  long declared = -1;
  std::vector<std::string> coord_props;
  std::vector<std::string> color_props;
  bool ended = false;
  while (next_line(s)) {
    auto tok = split_ws(s);
    if (tok.empty()) throw ParseError(path, line, "blank header line");
    if (tok[0] == "comment") {
      if (tok.size() >= 2 && tok[1] == "frame") {
        std::size_t pos = s.find("frame") + 5;
        while (pos < s.size() && s[pos] == ' ') ++pos;
        cloud.frame = s.substr(pos);
      }
      continue;
    }
    if (tok[0] == "element") {
      if (tok.size() != 3 || tok[1] != "vertex")
        throw ParseError(path, line, "only 'element vertex' is supported");
      if (declared >= 0)
        throw ParseError(path, line, "duplicate vertex element");
      declared = parse_long(tok[2], path, line);
      if (declared < 0) throw ParseError(path, line, "negative vertex count");
      continue;
    }
    if (tok[0] == "property") {
      if (declared < 0)
        throw ParseError(path, line, "property before vertex element");
      if (tok.size() != 3)
        throw ParseError(path, line, "malformed property line");
      if (tok[1] == "double" || tok[1] == "float") {
        coord_props.push_back(tok[2]);
      } else if (tok[1] == "uchar") {
        color_props.push_back(tok[2]);
      } else {
        throw ParseError(path, line,
                         "unsupported property type '" + tok[1] + "'");
      }
      continue;
    }
    if (tok[0] == "end_header") {
      ended = true;
      break;
    }
    throw ParseError(path, line, "unexpected header line '" + tok[0] + "'");
  }
  if (!ended) throw ParseError(path, line, "missing end_header");
  if (declared < 0) throw ParseError(path, line, "missing vertex element");
  if (coord_props != std::vector<std::string>{"x", "y", "z"})
    throw ParseError(path, line, "vertex properties must be x, y, z");
  bool has_color = !color_props.empty();
  if (has_color &&
      color_props !=
          std::vector<std::string>{"red", "green", "blue", "colored"})
    throw ParseError(path, line,
                     "color block must be red, green, blue, colored");

  cloud.points.reserve(std::size_t(declared));
  if (has_color) cloud.colors.reserve(std::size_t(declared));
  long got = 0;
  while (got < declared) {
    if (!next_line(s))
      throw ParseError(path, line,
                       "vertex count mismatch (expected " +
                           std::to_string(declared) + ", got " +
                           std::to_string(got) + ")");
    auto tok = split_ws(s);
    std::size_t want = has_color ? 7u : 3u;
    if (tok.size() != want)
      throw ParseError(path, line,
                       "vertex line has " + std::to_string(tok.size()) +
                           " fields (expected " + std::to_string(want) + ")");
    Point3 p{parse_double(tok[0], path, line), parse_double(tok[1], path, line),
             parse_double(tok[2], path, line)};
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
      throw ParseError(path, line, "non-finite coordinate");
    cloud.points.push_back(p);
    if (has_color) {
      long r = parse_long(tok[3], path, line);
      long g = parse_long(tok[4], path, line);
      long b = parse_long(tok[5], path, line);
      if (r < 0 || r > 255 || g < 0 || g > 255 || b < 0 || b > 255)
        throw ParseError(path, line, "color channel out of range");
      long flag = parse_long(tok[6], path, line);
      if (flag != 0 && flag != 1)
        throw ParseError(path, line, "colored flag must be 0 or 1");
      Color c;
      if (flag == 1) {
        c.r = std::uint8_t(r);
        c.g = std::uint8_t(g);
        c.b = std::uint8_t(b);
        c.present = true;
      }
      cloud.colors.push_back(c);
    }
    ++got;
  }
  while (next_line(s)) {
    if (!split_ws(s).empty())
      throw ParseError(path, line, "trailing data after vertex list");
  }
  return cloud;
}

void write_point_cloud(const PointCloud& cloud, const std::string& path) {
  bool has_color = cloud.has_color_channel();
  auto out = open_out(path);
  out << "ply\nformat ascii 1.0\n";
  if (!cloud.frame.empty()) out << "comment frame " << cloud.frame << "\n";
  out << "element vertex " << cloud.size() << "\n";
  out << "property double x\nproperty double y\nproperty double z\n";
  if (has_color)
    out << "property uchar red\nproperty uchar green\nproperty uchar blue\n"
           "property uchar colored\n";
  out << "end_header\n";
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point3& p = cloud.points[i];
    out << g17(p.x) << ' ' << g17(p.y) << ' ' << g17(p.z);
    if (has_color) {
      Color c = cloud.colors[i];
      if (!c.present) c = Color{};  // stored channels are meaningless
      out << ' ' << int(c.r) << ' ' << int(c.g) << ' ' << int(c.b) << ' '
          << (c.present ? 1 : 0);
    }
    out << '\n';
  }
  finish_out(out, path);
}

Trajectory read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  Trajectory traj;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = strip_cr(raw);
    auto tok = split_char(s, ',');
    if (tok.size() != 4)
      throw ParseError(path, line,
                       "expected 4 comma-separated fields (got " +
                           std::to_string(tok.size()) + ")");
    TrajectorySample sample;
    sample.t = parse_double(tok[0], path, line);
    sample.position = Point3{parse_double(tok[1], path, line),
                             parse_double(tok[2], path, line),
                             parse_double(tok[3], path, line)};
    if (!std::isfinite(sample.t) || !std::isfinite(sample.position.x) ||
        !std::isfinite(sample.position.y) || !std::isfinite(sample.position.z))
      throw ParseError(path, line, "non-finite value");
    if (sample.t < 0) throw ParseError(path, line, "negative timestamp");
    if (!traj.samples.empty() && sample.t <= traj.samples.back().t)
      throw ParseError(path, line, "timestamps not strictly increasing");
    traj.samples.push_back(sample);
  }
  return traj;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  auto out = open_out(path);
  for (const TrajectorySample& s : traj.samples) {
    out << format_shortest(s.t) << ',' << format_shortest(s.position.x) << ','
        << format_shortest(s.position.y) << ','
        << format_shortest(s.position.z) << '\n';
  }
  finish_out(out, path);
}

std::vector<BarometerSample> read_barometer_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  std::vector<BarometerSample> out;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = strip_cr(raw);
    auto tok = split_char(s, ',');
    if (tok.size() != 2)
      throw ParseError(path, line,
                       "expected 2 comma-separated fields (got " +
                           std::to_string(tok.size()) + ")");
    BarometerSample sample;
    sample.t = parse_double(tok[0], path, line);
    sample.pressure = parse_double(tok[1], path, line);
    if (!std::isfinite(sample.t) || !std::isfinite(sample.pressure))
      throw ParseError(path, line, "non-finite value");
    if (sample.t < 0) throw ParseError(path, line, "negative timestamp");
    if (sample.pressure <= 0)
      throw ParseError(path, line, "non-positive pressure");
    if (!out.empty() && sample.t < out.back().t)
      throw ParseError(path, line, "timestamps decrease");
    out.push_back(sample);
  }
  return out;
}

void write_barometer_csv(const std::vector<BarometerSample>& samples,
                         const std::string& path) {
  auto out = open_out(path);
  for (const BarometerSample& s : samples)
    out << format_shortest(s.t) << ',' << format_shortest(s.pressure) << '\n';
  finish_out(out, path);
}

DomRaster read_dom_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, 0, "cannot open file");
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  std::size_t pos = 0;
  int line = 1;
  auto skip_ws = [&]() {
    while (pos < data.size()) {
      char c = data[pos];
      if (c == '\n') {
        ++line;
        ++pos;
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\f' ||
                 c == '\v') {
        ++pos;
      } else if (c == '#') {
        while (pos < data.size() && data[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
  };
  auto next_token = [&](int& tok_line) {
    skip_ws();
    tok_line = line;
    std::size_t start = pos;
    while (pos < data.size() &&
           !std::isspace(static_cast<unsigned char>(data[pos])))
      ++pos;
    return data.substr(start, pos - start);
  };

  int tline = 1;
  std::string magic = next_token(tline);
  if (magic != "P2" && magic != "P5")
    throw ParseError(path, tline, "unsupported magic (want P2 or P5)");
  long w = parse_long(next_token(tline), path, tline);
  long h = parse_long(next_token(tline), path, tline);
  if (w <= 0 || h <= 0)
    throw ParseError(path, tline, "dimensions must be positive");
  long maxval = parse_long(next_token(tline), path, tline);
  if (maxval < 1) throw ParseError(path, tline, "maxval must be positive");
  if (maxval > 255) throw ParseError(path, tline, "maxval exceeds 255");

  DomRaster dom;
  dom.width = int(w);
  dom.height = int(h);
  dom.values.resize(std::size_t(w) * std::size_t(h));
  std::size_t count = dom.values.size();
  if (magic == "P2") {
    for (std::size_t i = 0; i < count; ++i) {
      std::string tok = next_token(tline);
      if (tok.empty()) throw ParseError(path, tline, "truncated pixel data");
      long v = parse_long(tok, path, tline);
      if (v < 0 || v > maxval)
        throw ParseError(path, tline, "pixel value exceeds maxval");
      dom.values[i] = std::uint8_t(v);
    }
    skip_ws();
    if (pos != data.size())
      throw ParseError(path, line, "trailing data after pixels");
  } else {
    if (pos >= data.size() ||
        !std::isspace(static_cast<unsigned char>(data[pos])))
      throw ParseError(path, line, "truncated pixel data");
    if (data[pos] == '\n') ++line;
    ++pos;
    if (data.size() - pos < count)
      throw ParseError(path, line, "truncated pixel data");
    for (std::size_t i = 0; i < count; ++i) {
      std::uint8_t v = std::uint8_t(data[pos + i]);
      if (long(v) > maxval)
        throw ParseError(path, line, "pixel value exceeds maxval");
      dom.values[i] = v;
    }
    pos += count;
    if (pos != data.size())
      throw ParseError(path, line, "trailing data after pixels");
  }

  std::string wpath = world_path_for(path);
  std::ifstream win(wpath);
  if (!win) throw ParseError(wpath, 0, "cannot open file");
  std::vector<double> vals;
  std::string raw;
  int wline = 0;
  while (std::getline(win, raw)) {
    ++wline;
    std::string s = strip_cr(raw);
    auto tok = split_ws(s);
    if (tok.empty()) continue;
    if (tok.size() != 1 || vals.size() == 6)
      throw ParseError(wpath, wline, "world file must have 6 lines");
    vals.push_back(parse_double(tok[0], wpath, wline));
  }
  if (vals.size() != 6)
    throw ParseError(wpath, wline, "world file must have 6 lines");
  if (vals[1] != 0.0) throw ParseError(wpath, 2, "rotation not supported");
  if (vals[2] != 0.0) throw ParseError(wpath, 3, "rotation not supported");
  if (vals[0] <= 0.0) throw ParseError(wpath, 1, "cell size must be positive");
  if (vals[3] >= 0.0) throw ParseError(wpath, 4, "cell size must be positive");
  if (vals[0] != -vals[3]) throw ParseError(wpath, 4, "non-square cell");
  dom.cell = vals[0];
  dom.origin_x = vals[4];
  dom.origin_y = vals[5];
  return dom;
}

void write_dom_pgm(const DomRaster& dom, const std::string& path) {
  auto out = open_out(path);
  out << "P2\n" << dom.width << ' ' << dom.height << "\n255\n";
  for (int row = 0; row < dom.height; ++row) {
    for (int col = 0; col < dom.width; ++col) {
      if (col) out << ' ';
      out << int(dom.at(col, row));
    }
    out << '\n';
  }
  finish_out(out, path);

  auto wout = open_out(world_path_for(path));
  wout << format_shortest(dom.cell) << "\n0\n0\n"
       << format_shortest(-dom.cell) << '\n'
       << format_shortest(dom.origin_x) << '\n'
       << format_shortest(dom.origin_y) << '\n';
  finish_out(wout, world_path_for(path));
}

DemGrid read_dem_asc(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  static const char* keys[6] = {"ncols",     "nrows",    "xllcorner",
                                "yllcorner", "cellsize", "NODATA_value"};
  double hv[6] = {0, 0, 0, 0, 0, 0};
  std::string raw;
  int line = 0;
  for (int k = 0; k < 6; ++k) {
    if (!std::getline(in, raw))
      throw ParseError(path, line,
                       std::string("expected header key '") + keys[k] + "'");
    ++line;
    auto tok = split_ws(strip_cr(raw));
    std::string lk = tok.empty() ? "" : tok[0];
    std::transform(lk.begin(), lk.end(), lk.begin(),
                   [](unsigned char c) { return char(std::tolower(c)); });
    std::string want = keys[k];
    std::transform(want.begin(), want.end(), want.begin(),
                   [](unsigned char c) { return char(std::tolower(c)); });
    if (tok.size() != 2 || lk != want)
      throw ParseError(path, line,
                       std::string("expected header key '") + keys[k] + "'");
    hv[k] = parse_double(tok[1], path, line);
  }
  DemGrid dem;
  if (hv[0] < 1 || hv[0] != std::floor(hv[0]))
    throw ParseError(path, 1, "ncols must be a positive integer");
  if (hv[1] < 1 || hv[1] != std::floor(hv[1]))
    throw ParseError(path, 2, "nrows must be a positive integer");
  if (hv[4] <= 0) throw ParseError(path, 5, "cellsize must be positive");
  dem.ncols = int(hv[0]);
  dem.nrows = int(hv[1]);
  dem.xllcorner = hv[2];
  dem.yllcorner = hv[3];
  dem.cellsize = hv[4];
  dem.nodata = hv[5];
  std::size_t need = std::size_t(dem.ncols) * std::size_t(dem.nrows);
  dem.z.reserve(need);
  while (std::getline(in, raw)) {
    ++line;
    for (const std::string& tok : split_ws(strip_cr(raw))) {
      if (dem.z.size() == need)
        throw ParseError(path, line,
                         "grid value count mismatch (expected " +
                             std::to_string(need) + ")");
      dem.z.push_back(parse_double(tok, path, line));
    }
  }
  if (dem.z.size() != need)
    throw ParseError(path, line,
                     "grid value count mismatch (expected " +
                         std::to_string(need) + ", got " +
                         std::to_string(dem.z.size()) + ")");
  return dem;
}

void write_dem_asc(const DemGrid& dem, const std::string& path) {
  auto out = open_out(path);
  out << "ncols " << dem.ncols << '\n';
  out << "nrows " << dem.nrows << '\n';
  out << "xllcorner " << format_shortest(dem.xllcorner) << '\n';
  out << "yllcorner " << format_shortest(dem.yllcorner) << '\n';
  out << "cellsize " << format_shortest(dem.cellsize) << '\n';
  out << "NODATA_value " << format_shortest(dem.nodata) << '\n';
  for (int row = 0; row < dem.nrows; ++row) {
    for (int col = 0; col < dem.ncols; ++col) {
      if (col) out << ' ';
      double v = dem.at(col, row);
      if (v == dem.nodata)
        out << format_shortest(dem.nodata);
      else
        out << f1(v);
    }
    out << '\n';
  }
  finish_out(out, path);
}

}  // namespace gully::io
