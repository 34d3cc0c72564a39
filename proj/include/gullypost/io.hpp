#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gullypost/types.hpp"

namespace gully::io {

// Orthophoto raster. `origin_x`/`origin_y` is the center of the top-left
// pixel (world-file convention); rows run north to south, columns west
// to east.
struct DomRaster {
  int width = 0;
  int height = 0;
  double origin_x = 0.0;
  double origin_y = 0.0;
  double cell = 1.0;
  std::vector<std::uint8_t> values;  // row-major, top row first

  std::uint8_t at(int col, int row) const {
    return values[std::size_t(row) * std::size_t(width) + std::size_t(col)];
  }
  double center_x(int col) const { return origin_x + col * cell; }
  double center_y(int row) const { return origin_y - row * cell; }
};

struct BarometerSample {
  double t = 0.0;
  double pressure = 0.0;  // Pa
};

// Elevation grid in ESRI ASCII layout. Row 0 is the northernmost row;
// `xllcorner`/`yllcorner` is the outer corner of the south-west cell.
struct DemGrid {
  int ncols = 0;
  int nrows = 0;
  double xllcorner = 0.0;
  double yllcorner = 0.0;
  double cellsize = 1.0;
  double nodata = -9999.0;
  std::vector<double> z;  // row-major, row 0 first

  double at(int col, int row) const {
    return z[std::size_t(row) * std::size_t(ncols) + std::size_t(col)];
  }
  double& at(int col, int row) {
    return z[std::size_t(row) * std::size_t(ncols) + std::size_t(col)];
  }
  bool is_valid(int col, int row) const { return at(col, row) != nodata; }
};

// ASCII PLY, x/y/z as %.17g. A color block (uchar r/g/b plus a uchar
// `colored` flag) is present exactly when the cloud carries colors.
// The frame tag round-trips through a `comment frame <tag>` header line.
PointCloud read_point_cloud(const std::string& path);
void write_point_cloud(const PointCloud& cloud, const std::string& path);

// CSV `t,x,y,z`, one sample per line, no header. Timestamps must be
// non-negative and strictly increasing.
Trajectory read_trajectory_csv(const std::string& path);
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

// CSV `t,pressure_pa`. Pressures must be positive, timestamps
// non-negative and non-decreasing.
std::vector<BarometerSample> read_barometer_csv(const std::string& path);
void write_barometer_csv(const std::vector<BarometerSample>& samples,
                         const std::string& path);

// PGM (P2 or P5, maxval <= 255) plus a 6-line world file at
// `path` with ".wld" substituted for the extension. The world file must
// encode an axis-aligned square cell.
DomRaster read_dom_pgm(const std::string& path);
void write_dom_pgm(const DomRaster& dom, const std::string& path);

DemGrid read_dem_asc(const std::string& path);
void write_dem_asc(const DemGrid& dem, const std::string& path);

// Shortest round-trip decimal form, "-0" normalized to "0".
std::string format_shortest(double v);

}  // namespace gully::io
