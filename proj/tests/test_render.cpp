// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0

#include "lunagen/render.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "lunagen/hash.hpp"
#include "lunagen/threading.hpp"

using namespace lunagen;

namespace {

DemGrid flat_grid(int n, double cell, double value = 0.0) {
  DemGrid dem;
  dem.ncols = dem.nrows = n;
  dem.cell_size = cell;
  dem.heights.assign(static_cast<std::size_t>(n) * n, value);
  return dem;
}

CameraModel small_camera(int size = 32) {
  CameraModel cam;
  cam.width = cam.height = size;
  cam.fx = cam.fy = size;  // ~53 degree field of view
  cam.cx = cam.cy = (size - 1) / 2.0;
  return cam;
}

Pose nadir_pose(double x, double y, double altitude) {
  Pose pose;
  pose.position = Vec3d(x, y, altitude);
  // Camera +z (boresight) down, +x east: rotate pi about the x axis.
  pose.attitude = Quatd(Eigen::AngleAxisd(std::numbers::pi, Vec3d::UnitX()));
  return pose;
}

Scene demo_scene(double height = 0.0) {
  // No opposition surge: B(g) with a narrow surge width varies measurably
  // across even a telephoto image at zero phase, which the uniformity test
  // below must not see.
  HapkeParams p;
  p.B0 = 0.0;
  return Scene::build(flat_grid(129, 4.0, height), BoulderField{}, p, Vec3d(0, 0, 1), 1361.0);
}

}  // namespace

TEST_CASE("render_frame: flat terrain under a zenith sun is uniform") {
  // Narrow field of view: emission angles are constant across the image to
  // first order, so translational symmetry makes every pixel equal.
  Scene scene = demo_scene();
  CameraModel cam = small_camera();
  cam.fx = cam.fy = 2000.0;
  RenderConfig cfg;
  cfg.supersampling = 2;
  cfg.gain = 1000.0;
  RenderedFrame frame = render_frame(scene, cam, nadir_pose(256, 256, 200), cfg);
  auto [lo, hi] = std::minmax_element(frame.image.pixels.begin(), frame.image.pixels.end());
  CHECK(*hi - *lo <= 1);
  CHECK(*hi > 0);
}

TEST_CASE("render_frame: principal-point depth equals the altitude") {
  Scene scene = demo_scene();
  CameraModel cam = small_camera();
  cam.cx = 15.0;
  cam.cy = 15.0;
  RenderConfig cfg;
  RenderedFrame frame = render_frame(scene, cam, nadir_pose(256, 256, 123.0), cfg);
  CHECK(frame.depth.at(15, 15) == doctest::Approx(123.0).epsilon(1e-9));
}

TEST_CASE("render_frame: byte-identical across worker counts") {
  Scene scene = demo_scene();
  CameraModel cam = small_camera();
  RenderConfig cfg;
  cfg.supersampling = 2;
  cfg.gain = 2e4;
  cfg.seed = 99;

  int saved = max_threads();
  set_max_threads(1);
  RenderedFrame one = render_frame(scene, cam, nadir_pose(250, 250, 150), cfg);
  set_max_threads(4);
  RenderedFrame four = render_frame(scene, cam, nadir_pose(250, 250, 150), cfg);
  set_max_threads(saved);

  CHECK(one.image.pixels == four.image.pixels);
  CHECK(one.depth.pixels == four.depth.pixels);
}

TEST_CASE("render_radiance: doubling the gain doubles every value exactly") {
  Scene scene = demo_scene();
  CameraModel cam = small_camera(16);
  RenderConfig cfg;
  cfg.gain = 1.7e4;
  ImageF base = render_radiance(scene, cam, nadir_pose(256, 256, 180), cfg);
  RenderConfig doubled = cfg;
  doubled.gain = 2.0 * cfg.gain;
  ImageF twice = render_radiance(scene, cam, nadir_pose(256, 256, 180), doubled);
  for (std::size_t i = 0; i < base.pixels.size(); ++i)
    CHECK(twice.pixels[i] == 2.0f * base.pixels[i]);
}

TEST_CASE("render_frame: camera below the terrain is rejected") {
  Scene scene = demo_scene(10.0);
  CameraModel cam = small_camera(8);
  RenderConfig cfg;
  CHECK_THROWS_AS(render_frame(scene, cam, nadir_pose(256, 256, 5.0), cfg), Error);
}

TEST_CASE("render_trajectory: composition, resume, and empty input") {
  Scene scene = demo_scene();
  CameraModel cam = small_camera(16);
  RenderConfig cfg;
  cfg.gain = 2e4;
  cfg.seed = 5;

  Trajectory traj;
  traj.samples.push_back({0.0, nadir_pose(200, 200, 150)});
  traj.samples.push_back({1.0, nadir_pose(210, 200, 140)});

  auto dir = std::filesystem::temp_directory_path() / "lunagen_render_test";
  std::filesystem::remove_all(dir);

  TrajectoryRenderOptions options;
  options.out_dir = dir;

  SUBCASE("empty frame list gives an empty record list") {
    auto records = render_trajectory(scene, cam, traj, {}, cfg, options);
    CHECK(records.empty());
  }

  SUBCASE("one frame reproduces render_frame output") {
    auto records = render_trajectory(scene, cam, traj, {0.5}, cfg, options);
    REQUIRE(records.size() == 1);
    CHECK(records[0].frame_id == "frame_000000");
    REQUIRE(records[0].pose.has_value());

    RenderedFrame direct = render_frame(scene, cam, interpolate_pose(traj, 0.5), cfg, 0);
    GrayPng png = load_png_gray(dir / records[0].image_path);
    REQUIRE(png.pixels.size() == direct.image.pixels.size());
    for (std::size_t i = 0; i < png.pixels.size(); ++i)
      CHECK(png.pixels[i] == direct.image.pixels[i]);
  }

  SUBCASE("resume skips frames whose outputs match the recorded checksums") {
    auto first = render_trajectory(scene, cam, traj, {0.0, 1.0}, cfg, options);
    auto t0 = std::filesystem::last_write_time(dir / first[0].image_path);
    auto again = render_trajectory(scene, cam, traj, {0.0, 1.0}, cfg, options);
    CHECK(std::filesystem::last_write_time(dir / again[0].image_path) == t0);

    // A corrupted image is re-rendered.
    {
      std::ofstream corrupt(dir / first[0].image_path, std::ios::binary | std::ios::trunc);
      corrupt << "junk";
    }
    auto repaired = render_trajectory(scene, cam, traj, {0.0, 1.0}, cfg, options);
    GrayPng png = load_png_gray(dir / repaired[0].image_path);
    CHECK(png.width == cam.width);
  }

  std::filesystem::remove_all(dir);
}
