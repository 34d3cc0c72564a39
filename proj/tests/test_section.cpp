#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gullypost/drift.hpp"
#include "gullypost/section.hpp"
#include "gullypost/types.hpp"
#include "oracles.hpp"

using namespace gully;
using section::ChartPoint;
using section::PointLabel;
using section::ProfilePoint;

namespace {

std::string tmp(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "gullypost_section_tests";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(bool(in));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Trajectory ramp_trajectory(int n) {
  Trajectory traj;
  for (int i = 0; i < n; ++i)
    traj.push_back({double(i), {double(i), 2.0 * i, 3.0 * i}});
  return traj;
}

}  // namespace

TEST_CASE("station plane takes the chord across the window") {
  auto traj = ramp_trajectory(8);
  auto plane = section::station_plane(traj, 3, 2);
  CHECK(plane.origin.x == 3.0);
  CHECK(plane.origin.y == 6.0);
  CHECK(plane.origin.z == 9.0);
  CHECK(plane.normal.x == 4.0);
  CHECK(plane.normal.y == 8.0);
  CHECK(plane.normal.z == 12.0);
  CHECK(plane.span == 2);

  CHECK_THROWS_AS(section::station_plane(traj, 3, 0), std::invalid_argument);
  CHECK_THROWS_AS(section::station_plane(traj, 1, 2), std::invalid_argument);
  CHECK_THROWS_AS(section::station_plane(traj, 6, 2), std::invalid_argument);

  Trajectory still;
  for (int i = 0; i < 5; ++i) still.push_back({double(i), {1.0, 2.0, 3.0}});
  CHECK_THROWS_AS(section::station_plane(still, 2, 1), NumericError);
}

TEST_CASE("projection with the squared denominator lands on the plane") {
  section::SectionPlane plane;
  plane.origin = {1.0, 0.0, 0.0};
  plane.normal = {2.0, 0.0, 0.0};

  PointCloud one;
  one.points.push_back({3.0, 5.0, 7.0});
  auto sq = section::project_points(one, plane, PlaneDenominator::squared);
  CHECK(sq.points[0].x == 1.0);
  CHECK(sq.points[0].y == 5.0);
  CHECK(sq.points[0].z == 7.0);
  auto lit = section::project_points(one, plane, PlaneDenominator::literal);
  CHECK(lit.points[0].x == -1.0);
  CHECK(lit.points[0].y == 5.0);
  CHECK(lit.points[0].z == 7.0);

  oracle::Rng rng(404);
  PointCloud cloud;
  for (int i = 0; i < 200; ++i) {
    cloud.points.push_back({rng.uniform(-50.0, 50.0), rng.uniform(-50.0, 50.0),
                            rng.uniform(-50.0, 50.0)});
  }
  section::SectionPlane tilted;
  tilted.origin = {3.0, -2.0, 11.0};
  tilted.normal = {0.8, -1.7, 0.4};
  auto proj = section::project_points(cloud, tilted);
  double nn = tilted.normal.norm();
  for (std::size_t i = 0; i < proj.size(); ++i) {
    Point3 d = cloud.points[i] - proj.points[i];
    double resid = std::abs(dot(proj.points[i] - tilted.origin, tilted.normal));
    CHECK(resid / nn <= 1e-9 * std::max(1.0, d.norm()));
  }
  auto twice = section::project_points(proj, tilted);
  for (std::size_t i = 0; i < proj.size(); ++i) {
    Point3 d = twice.points[i] - proj.points[i];
    CHECK(std::abs(d.x) <= 1e-9);
    CHECK(std::abs(d.y) <= 1e-9);
    CHECK(std::abs(d.z) <= 1e-9);
  }

  section::SectionPlane bad;
  bad.origin = {0, 0, 0};
  bad.normal = {0, 0, 0};
  CHECK_THROWS_AS(section::project_points(cloud, bad), NumericError);
}

TEST_CASE("plane chart recovers in-plane offsets for a horizontal normal") {
  section::SectionPlane plane;
  plane.origin = {10.0, 5.0, 100.0};
  plane.normal = {0.0, 3.0, 0.0};
  PointCloud one;
  one.points.push_back({7.0, 99.0, 103.0});
  auto chart = section::to_plane_coords(one, plane);
  CHECK(chart[0].w == 3.0);
  CHECK(chart[0].h == 3.0);

  // points built from the chart basis come back with the same coordinates
  double hn = std::hypot(plane.normal.x, plane.normal.y);
  Point3 u{-plane.normal.y / hn, plane.normal.x / hn, 0.0};
  oracle::Rng rng(11);
  PointCloud cloud;
  std::vector<ChartPoint> want;
  for (int i = 0; i < 100; ++i) {
    double a = rng.uniform(-20.0, 20.0);
    double b = rng.uniform(-5.0, 5.0);
    cloud.points.push_back(plane.origin + u * a + Point3{0.0, 0.0, b});
    want.push_back({a, b});
  }
  auto got = section::to_plane_coords(cloud, plane);
  for (std::size_t i = 0; i < want.size(); ++i) {
    CHECK(std::abs(got[i].w - want[i].w) <= 1e-12);
    CHECK(std::abs(got[i].h - want[i].h) <= 1e-12);
  }

  section::SectionPlane vertical;
  vertical.normal = {0.0, 0.0, 1.0};
  CHECK_THROWS_AS(section::to_plane_coords(cloud, vertical), NumericError);
}

TEST_CASE("steep flanks are walls, the flat floor is ground") {
  std::vector<ChartPoint> samples;
  for (double w = -10.0; w <= 10.0 + 1e-9; w += 0.5) {
    double h = std::abs(w) > 5.0 ? 3.0 * (std::abs(w) - 5.0) : 0.0;
    samples.push_back({w, h});
  }
  // shuffle deterministically so label order is checked in input order
  std::vector<std::size_t> perm(samples.size());
  for (std::size_t i = 0; i < perm.size(); ++i)
    perm[i] = (i * 17) % perm.size();
  std::vector<ChartPoint> shuffled;
  for (std::size_t i : perm) shuffled.push_back(samples[i]);

  auto labels = section::classify_wall_ground(shuffled, 1.0);
  REQUIRE(labels.size() == shuffled.size());
  for (std::size_t i = 0; i < shuffled.size(); ++i) {
    double w = shuffled[i].w;
    if (std::abs(w) <= 4.0) CHECK(labels[i] == PointLabel::ground);
    if (std::abs(w) >= 6.0) CHECK(labels[i] == PointLabel::wall);
  }

  std::vector<ChartPoint> column(5, ChartPoint{1.0, 0.0});
  for (std::size_t i = 0; i < column.size(); ++i) column[i].h = double(i);
  auto vertical = section::classify_wall_ground(column, 1.0);
  for (auto l : vertical) CHECK(l == PointLabel::wall);

  CHECK_THROWS_AS(section::classify_wall_ground({{0.0, 0.0}}, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(section::classify_wall_ground(column, 0.0),
                  std::invalid_argument);
}

TEST_CASE("reconstruction orders the profile and bounds the gaps") {
  std::vector<ChartPoint> samples;
  std::vector<PointLabel> labels;
  auto add = [&](double w, double h, PointLabel l) {
    samples.push_back({w, h});
    labels.push_back(l);
  };
  // V channel: left wall, floor, right wall, entered out of order
  for (double h = 6.0; h >= 0.5; h -= 0.5)
    add(-4.0 - h * 0.2, h, PointLabel::wall);
  for (double h = 0.5; h <= 6.0; h += 0.5)
    add(4.0 + h * 0.2, h, PointLabel::wall);
  for (double w = -4.0; w <= 4.0 + 1e-9; w += 0.4)
    add(w, 0.0, PointLabel::ground);

  auto profile = section::reconstruct(samples, labels, 2, 3, 0.2);
  REQUIRE(profile.size() >= samples.size());
  CHECK(profile.front().label == PointLabel::wall);
  CHECK(profile.back().label == PointLabel::wall);
  CHECK(profile.front().w < 0.0);
  CHECK(profile.back().w > 0.0);
  CHECK(profile.front().h > 4.0);
  CHECK(profile.back().h > 4.0);
  for (std::size_t i = 1; i < profile.size(); ++i) {
    double gap = std::hypot(profile[i].w - profile[i - 1].w,
                            profile[i].h - profile[i - 1].h);
    CHECK(gap <= 0.2 + 1e-9);
  }

  // subdividing finer does not change the enclosed area
  auto fine = section::reconstruct(samples, labels, 2, 3, 0.05);
  double a1 = section::section_area(profile, 6.0);
  double a2 = section::section_area(fine, 6.0);
  CHECK(a1 == doctest::Approx(a2).epsilon(1e-9));

  CHECK_THROWS_AS(section::reconstruct(samples, {}, 2, 3, 0.2),
                  std::invalid_argument);
  CHECK_THROWS_AS(section::reconstruct(samples, labels, 2, 3, 0.0),
                  std::invalid_argument);
  std::vector<ChartPoint> few = {{0, 0}, {1, 0}};
  CHECK_THROWS_AS(
      section::reconstruct(few, {PointLabel::ground, PointLabel::ground}, 2, 1,
                           0.2),
      std::invalid_argument);
}

TEST_CASE("rectangular and triangular sections have exact areas") {
  std::vector<ProfilePoint> rect = {{0.0, 2.0, PointLabel::wall},
                                    {0.0, 0.0, PointLabel::ground},
                                    {4.0, 0.0, PointLabel::ground},
                                    {4.0, 2.0, PointLabel::wall}};
  CHECK(std::abs(section::section_area(rect, 2.0) - 8.0) <= 1e-12);

  std::vector<ProfilePoint> tri = {{-2.0, 2.0, PointLabel::wall},
                                   {0.0, 0.0, PointLabel::ground},
                                   {2.0, 2.0, PointLabel::wall}};
  CHECK(std::abs(section::section_area(tri, 2.0) - 4.0) <= 1e-12);

  // walls above the cap are clamped to it
  std::vector<ProfilePoint> tall = {{0.0, 5.0, PointLabel::wall},
                                    {0.0, 0.0, PointLabel::ground},
                                    {4.0, 0.0, PointLabel::ground},
                                    {4.0, 5.0, PointLabel::wall}};
  CHECK(std::abs(section::section_area(tall, 2.0) - 8.0) <= 1e-12);

  // a cap above the rims closes over the profile ends
  CHECK(std::abs(section::section_area(tri, 3.0) - 8.0) <= 1e-12);

  std::vector<ProfilePoint> bowtie = {{0.0, 0.0, PointLabel::ground},
                                      {2.0, 2.0, PointLabel::ground},
                                      {0.0, 2.0, PointLabel::ground},
                                      {2.0, 0.0, PointLabel::ground}};
  CHECK_THROWS_AS(section::section_area(bowtie, 5.0), NumericError);
  CHECK_THROWS_AS(section::section_area({{0.0, 0.0, PointLabel::ground}}, 1.0),
                  std::invalid_argument);
}

TEST_CASE("trapezoid area matches the closed form") {
  // floor 2 wide, walls at slope 1 up to h = 3, cap 3
  std::vector<ProfilePoint> prof = {{-4.0, 3.0, PointLabel::wall},
                                    {-1.0, 0.0, PointLabel::ground},
                                    {1.0, 0.0, PointLabel::ground},
                                    {4.0, 3.0, PointLabel::wall}};
  double expect = 0.5 * (2.0 + 8.0) * 3.0;
  CHECK(section::section_area(prof, 3.0) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("unit fusion slices the grouped cloud by unit runs") {
  oracle::Rng rng(31);
  PointCloud map;
  for (int i = 0; i < 120; ++i) {
    map.points.push_back({rng.uniform(0.0, 30.0), rng.uniform(0.0, 30.0),
                          rng.uniform(0.0, 3.0)});
    map.colors.push_back({std::uint8_t(i), std::uint8_t(i / 2), 7, true});
  }
  map.frame = "grouped";
  Trajectory anchors;
  for (int j = 0; j < 5; ++j)
    anchors.push_back({double(j), {5.0 + 5.0 * j, 15.0, 0.0}});
  auto part = drift::partition_units(map, anchors);
  auto grouped = drift::apply_partition_order(map, part);

  auto fused = section::fuse_units(grouped, part, 3, 1);
  std::size_t begin = part.unit_begin[1], end = part.unit_begin[4];
  REQUIRE(fused.size() == end - begin);
  CHECK(fused.frame == "grouped");
  for (std::size_t p = 0; p < fused.size(); ++p) {
    CHECK(fused.points[p].x == grouped.points[begin + p].x);
    CHECK(fused.colors[p] == grouped.colors[begin + p]);
  }

  CHECK_THROWS_AS(section::fuse_units(grouped, part, 1, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(section::fuse_units(grouped, part, 5, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(section::fuse_units(grouped, part, 2, -1),
                  std::invalid_argument);
}

TEST_CASE("section csv writes read back identically") {
  section::SectionPlane plane;
  plane.origin = {1.0 / 3.0, -2.5, 1090.125};
  plane.normal = {0.25, -0.75, 0.0625};
  std::vector<ProfilePoint> profile = {{-3.0, 2.0 / 3.0, PointLabel::wall},
                                       {-0.0, 0.0, PointLabel::ground},
                                       {0.1, 0.2, PointLabel::ground},
                                       {3.5, 1.75, PointLabel::wall}};
  auto p1 = tmp("sec_a.csv");
  auto p2 = tmp("sec_b.csv");
  section::write_section_csv(profile, plane, p1);
  auto file = section::read_section_csv(p1);
  CHECK(file.plane.origin.x == plane.origin.x);
  CHECK(file.plane.normal.z == plane.normal.z);
  REQUIRE(file.profile.size() == profile.size());
  for (std::size_t i = 0; i < profile.size(); ++i) {
    CHECK(file.profile[i].w == profile[i].w);
    CHECK(file.profile[i].h == profile[i].h);
    CHECK(file.profile[i].label == profile[i].label);
  }
  section::write_section_csv(file.profile, file.plane, p2);
  CHECK(slurp(p1) == slurp(p2));
}

TEST_CASE("section csv parse errors name the line") {
  auto bad = [&](const std::string& name, const std::string& text,
                 int want_line) {
    auto p = tmp(name);
    std::ofstream(p, std::ios::binary) << text;
    try {
      section::read_section_csv(p);
      FAIL("expected ParseError for " << name);
    } catch (const ParseError& e) {
      CHECK(e.line() == want_line);
    }
  };
  bad("no_header.csv", "0,0,ground\n", 1);
  bad("bad_label.csv", "# origin 0 0 0 normal 1 0 0\n0,0,floor\n", 2);
  bad("two_fields.csv", "# origin 0 0 0 normal 1 0 0\n0,0\n", 2);
  bad("bad_number.csv", "# origin 0 0 0 normal 1 0 0\n0,zz,wall\n", 2);
  CHECK_THROWS_AS(section::read_section_csv(tmp("absent.csv")), ParseError);
}
