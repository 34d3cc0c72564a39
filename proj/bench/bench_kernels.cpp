#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <vector>

#include "gullypost/analysis.hpp"
#include "gullypost/drift.hpp"
#include "gullypost/io.hpp"
#include "gullypost/smoothing.hpp"
#include "gullypost/types.hpp"

namespace {

using namespace gully;

PointCloud random_cloud(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> dist(0.0, 100.0);
  PointCloud cloud;
  cloud.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    cloud.points.push_back({dist(eng), dist(eng), dist(eng) * 0.1});
  }
  return cloud;
}

Trajectory line_anchors(std::size_t n) {
  Trajectory traj;
  traj.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    traj.push_back({double(i), {double(i) * 0.5, 10.0, 0.0}});
  }
  return traj;
}

io::DomRaster random_dom(int width, int height, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::uniform_int_distribution<int> dist(0, 255);
  io::DomRaster dom;
  dom.width = width;
  dom.height = height;
  dom.cell = 1.0;
  dom.origin_x = 0.5;
  dom.origin_y = height - 0.5;
  dom.values.resize(std::size_t(width) * height);
  for (auto& t : dom.values) t = std::uint8_t(dist(eng));
  return dom;
}

void BM_SmoothSerial(benchmark::State& state) {
  auto cloud = random_cloud(std::size_t(state.range(0)), 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(smoothing::smooth_serial(cloud, 10, 6));
  }
}

void BM_SmoothParallel(benchmark::State& state) {
  auto cloud = random_cloud(std::size_t(state.range(0)), 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(smoothing::smooth(cloud, 10, 6));
  }
}

void BM_PartitionSerial(benchmark::State& state) {
  auto cloud = random_cloud(std::size_t(state.range(0)), 11);
  auto anchors = line_anchors(200);
  for (auto _ : state) {
    benchmark::DoNotOptimize(drift::partition_units_serial(cloud, anchors));
  }
}

void BM_PartitionParallel(benchmark::State& state) {
  auto cloud = random_cloud(std::size_t(state.range(0)), 11);
  auto anchors = line_anchors(200);
  for (auto _ : state) {
    benchmark::DoNotOptimize(drift::partition_units(cloud, anchors));
  }
}

void BM_SegmentSerial(benchmark::State& state) {
  auto dom = random_dom(int(state.range(0)), int(state.range(0)), 13);
  for (auto _ : state) {
    benchmark::DoNotOptimize(drift::segment_channel_serial(dom, 15, 0.15));
  }
}

void BM_SegmentParallel(benchmark::State& state) {
  auto dom = random_dom(int(state.range(0)), int(state.range(0)), 13);
  for (auto _ : state) {
    benchmark::DoNotOptimize(drift::segment_channel(dom, 15, 0.15));
  }
}

void BM_RasterizeSerial(benchmark::State& state) {
  auto cloud = random_cloud(std::size_t(state.range(0)), 17);
  for (auto _ : state) {
    benchmark::DoNotOptimize(analysis::rasterize_dem_serial(cloud, 0.1, 0.1));
  }
}

void BM_RasterizeParallel(benchmark::State& state) {
  auto cloud = random_cloud(std::size_t(state.range(0)), 17);
  for (auto _ : state) {
    benchmark::DoNotOptimize(analysis::rasterize_dem(cloud, 0.1, 0.1));
  }
}

BENCHMARK(BM_SmoothSerial)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SmoothParallel)
    ->Arg(2000)
    ->Arg(20000)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PartitionSerial)
    ->Arg(20000)
    ->Arg(200000)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PartitionParallel)
    ->Arg(20000)
    ->Arg(200000)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SegmentSerial)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SegmentParallel)
    ->Arg(256)
    ->Arg(1024)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RasterizeSerial)
    ->Arg(100000)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RasterizeParallel)
    ->Arg(100000)
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
