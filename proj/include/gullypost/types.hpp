#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gully {

struct Point3 {
  double x = 0.0, y = 0.0, z = 0.0;

  double squared_norm() const { return x * x + y * y + z * z; }
  double norm() const { return std::sqrt(squared_norm()); }
};

inline Point3 operator+(const Point3& a, const Point3& b) {
  return {a.x + b.x, a.y + b.y, a.z + b.z};
}
inline Point3 operator-(const Point3& a, const Point3& b) {
  return {a.x - b.x, a.y - b.y, a.z - b.z};
}
inline Point3 operator*(double s, const Point3& p) {
  return {s * p.x, s * p.y, s * p.z};
}
inline Point3 operator*(const Point3& p, double s) {
  return {p.x * s, p.y * s, p.z * s};
}
inline double dot(const Point3& a, const Point3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

/// RGB color with an explicit presence flag, so (0,0,0) black stays a
/// legal color and "uncolored" needs no sentinel value.
struct Color {
  std::uint8_t r = 0, g = 0, b = 0;
  bool present = false;
};

inline bool operator==(const Color& a, const Color& b) {
  if (a.present != b.present) return false;
  if (!a.present) return true;
  return a.r == b.r && a.g == b.g && a.b == b.b;
}

/// Ordered point set. Point order is significant: drift correction reorders
/// clouds so correction units become contiguous, and later stages rely on
/// that ordering. `colors` is either empty (no color channel at all) or
/// holds exactly one entry per point.
struct PointCloud {
  std::vector<Point3> points;
  std::vector<Color> colors;
  std::string frame;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool has_color_channel() const { return !colors.empty(); }
  Color color_at(std::size_t i) const {
    return colors.empty() ? Color{} : colors[i];
  }
};

struct TrajectorySample {
  double t = 0.0;  // seconds since recording start
  Point3 position;
};

/// Time-ordered platform path. Timestamps are strictly increasing; the
/// correction operations additionally require at least two samples.
struct Trajectory {
  std::vector<TrajectorySample> samples;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  void reserve(std::size_t n) { samples.reserve(n); }
  void push_back(const TrajectorySample& s) { samples.push_back(s); }
  TrajectorySample& operator[](std::size_t i) { return samples[i]; }
  const TrajectorySample& operator[](std::size_t i) const {
    return samples[i];
  }
  TrajectorySample& front() { return samples.front(); }
  const TrajectorySample& front() const { return samples.front(); }
  TrajectorySample& back() { return samples.back(); }
  const TrajectorySample& back() const { return samples.back(); }
  auto begin() { return samples.begin(); }
  auto begin() const { return samples.begin(); }
  auto end() { return samples.end(); }
  auto end() const { return samples.end(); }
};

/// Multipliers mapping a drifted map to benchmark scale: f_h applies to
/// x and y, f_e to z. Both strictly positive.
struct ScalingFactors {
  double f_h = 1.0;
  double f_e = 1.0;
};

/// Section projection variant: `squared` divides the projection coefficient
/// by |d|^2 (points land exactly on the plane); `literal` divides by |d|.
enum class PlaneDenominator { squared, literal };

/// Malformed input data. Carries the offending file and 1-based line; a
/// line of 0 means the position is not line-addressable (e.g. missing file).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string path, long line, const std::string& message)
      : std::runtime_error(format(path, line, message)),
        path_(std::move(path)),
        line_(line) {}

  const std::string& path() const { return path_; }
  long line() const { return line_; }

 private:
  static std::string format(const std::string& path, long line,
                            const std::string& message) {
    std::string s = path.empty() ? message : path + ": " + message;
    if (line > 0) s += " (line " + std::to_string(line) + ")";
    return s;
  }

  std::string path_;
  long line_;
};

/// Data-dependent numerical failure: degenerate geometry, flat inputs,
/// non-convergence. Distinct from ParseError so the command line can map
/// the two to different exit codes.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gully
