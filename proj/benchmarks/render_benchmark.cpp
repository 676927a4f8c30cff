// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <numbers>

#include "lunagen/hapke.hpp"
#include "lunagen/hash.hpp"
#include "lunagen/procedural.hpp"
#include "lunagen/render.hpp"
#include "lunagen/scene.hpp"
#include "lunagen/threading.hpp"

using namespace lunagen;

namespace {

Scene make_scene(int n) {
  DemGrid flat;
  flat.ncols = flat.nrows = n;
  flat.cell_size = 2.0;
  flat.heights.assign(static_cast<std::size_t>(n) * n, 0.0);
  NoiseSpec spec;
  spec.amplitude = 10.0;
  spec.base_wavelength = 64.0;
  spec.octaves = 4;
  spec.seed = 7;
  DemGrid dem = add_perlin(flat, spec);
  BoulderField boulders = generate_boulders(dem_extent(dem), 60.0, 0.5, 3.0, 3.0, 9);
  return Scene::build(dem, boulders, HapkeParams{}, Vec3d(0.5, 0.2, 0.8).normalized(), 1361.0);
}

Pose nadir_pose(const Scene& scene, double altitude) {
  const DemGrid& dem = scene.dem();
  Pose pose;
  pose.position = Vec3d(0.5 * (dem.x_min() + dem.x_max()), 0.5 * (dem.y_min() + dem.y_max()),
                        altitude);
  pose.attitude = Quatd(Eigen::AngleAxisd(std::numbers::pi, Vec3d::UnitX()));
  return pose;
}

void BM_HapkeBrdf(benchmark::State& state) {
  HapkeParams p;
  std::uint64_t k = 0;
  for (auto _ : state) {
    double mu0 = 0.05 + 0.95 * uniform_double(1, k);
    double mu = 0.05 + 0.95 * uniform_double(2, k);
    double g = 3.0 * uniform_double(3, k);
    benchmark::DoNotOptimize(hapke_brdf(p, mu0, mu, g));
    ++k;
  }
}
BENCHMARK(BM_HapkeBrdf);

void BM_TraceRay(benchmark::State& state) {
  Scene scene = make_scene(static_cast<int>(state.range(0)));
  const DemGrid& dem = scene.dem();
  std::uint64_t k = 0;
  for (auto _ : state) {
    Vec3d origin(dem.x_min() + uniform_double(10, k) * (dem.x_max() - dem.x_min()),
                 dem.y_min() + uniform_double(11, k) * (dem.y_max() - dem.y_min()),
                 60.0 + 40.0 * uniform_double(12, k));
    double az = 2.0 * std::numbers::pi * uniform_double(13, k);
    double dz = -0.2 - 0.75 * uniform_double(14, k);
    double dxy = std::sqrt(1.0 - dz * dz);
    Ray ray{origin, Vec3d(dxy * std::cos(az), dxy * std::sin(az), dz)};
    benchmark::DoNotOptimize(scene.trace_ray(ray));
    ++k;
  }
}
BENCHMARK(BM_TraceRay)->Arg(257)->Arg(1025);

void BM_RenderFrame(benchmark::State& state) {
  Scene scene = make_scene(513);
  CameraModel cam;
  cam.width = cam.height = static_cast<int>(state.range(0));
  cam.fx = cam.fy = cam.width;
  cam.cx = cam.cy = (cam.width - 1) / 2.0;
  Pose pose = nadir_pose(scene, 300.0);
  RenderConfig cfg;
  cfg.supersampling = 2;
  cfg.gain = 2000.0;
  std::uint64_t frame = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_frame(scene, cam, pose, cfg, frame++));
  }
  state.SetItemsProcessed(state.iterations() * cam.width * cam.height);
}
BENCHMARK(BM_RenderFrame)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
