// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0

#include "lunagen/geom.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "lunagen/hash.hpp"

using namespace lunagen;

namespace {

CameraModel test_camera() {
  CameraModel cam;
  cam.width = 100;
  cam.height = 100;
  cam.fx = cam.fy = 100.0;
  cam.cx = cam.cy = 50.0;
  return cam;
}

Pose random_pose(std::uint64_t seed) {
  Pose pose;
  pose.position = Vec3d(uniform_double(seed, 0) * 200 - 100, uniform_double(seed, 1) * 200 - 100,
                        uniform_double(seed, 2) * 200 - 100);
  Eigen::Vector4d q(uniform_double(seed, 3) - 0.5, uniform_double(seed, 4) - 0.5,
                    uniform_double(seed, 5) - 0.5, uniform_double(seed, 6) - 0.5);
  q.normalize();
  pose.attitude = Quatd(q(0), q(1), q(2), q(3));
  return pose;
}

}  // namespace

TEST_CASE("project: optical axis maps to the principal point") {
  CameraModel cam = test_camera();
  Pose pose;  // identity at origin, +z boresight
  auto p = project(cam, pose, Vec3d(0, 0, 7.5));
  CHECK(p.pixel.x() == doctest::Approx(50.0).epsilon(1e-12));
  CHECK(p.pixel.y() == doctest::Approx(50.0).epsilon(1e-12));
  CHECK(p.depth == doctest::Approx(7.5));
}

TEST_CASE("project: hand-computed pinhole example") {
  // fx * x / z + cx = 100 * 1 / 10 + 50 = 60.
  CameraModel cam = test_camera();
  Pose pose;
  auto p = project(cam, pose, Vec3d(1, 0, 10));
  CHECK(p.pixel.x() == doctest::Approx(60.0).epsilon(1e-12));
  CHECK(p.pixel.y() == doctest::Approx(50.0).epsilon(1e-12));
  CHECK(p.depth == doctest::Approx(10.0));
}

TEST_CASE("project: point at or behind the camera plane") {
  CameraModel cam = test_camera();
  Pose pose;
  CHECK_THROWS_AS(project(cam, pose, Vec3d(0, 0, 0)), Error);
  try {
    project(cam, pose, Vec3d(1, 2, -3));
    FAIL("expected behind-camera error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::behind_camera);
  }
}

TEST_CASE("backproject: axis case and projection inverse") {
  CameraModel cam = test_camera();
  Pose pose;
  CHECK((backproject(cam, pose, Vec2d(50, 50), 4.0) - Vec3d(0, 0, 4)).norm() < 1e-12);
  // Inverse of the (60, 50) example: world x = 1.
  Vec3d w = backproject(cam, pose, Vec2d(60, 50), 10.0);
  CHECK(w.x() == doctest::Approx(1.0).epsilon(1e-12));

  try {
    backproject(cam, pose, Vec2d(50, 50), 0.0);
    FAIL("expected invalid-depth error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_depth);
  }
}

TEST_CASE("project/backproject are mutual inverses on random inputs") {
  CameraModel cam = test_camera();
  for (std::uint64_t k = 0; k < 10000; ++k) {
    Pose pose = random_pose(hash_counters(99, k));
    Vec2d pixel(uniform_double(k, 10) * cam.width, uniform_double(k, 11) * cam.height);
    double depth = 0.1 + uniform_double(k, 12) * 500.0;
    Vec3d world = backproject(cam, pose, pixel, depth);
    auto p = project(cam, pose, world);
    CHECK(std::abs(p.pixel.x() - pixel.x()) < 1e-6);
    CHECK(std::abs(p.pixel.y() - pixel.y()) < 1e-6);
    CHECK(std::abs(p.depth - depth) < 1e-6);
  }
}

TEST_CASE("projection is invariant under a common rigid transform") {
  CameraModel cam = test_camera();
  for (std::uint64_t k = 0; k < 200; ++k) {
    Pose pose = random_pose(hash_counters(7, k));
    Vec3d point = pose.camera_to_world(
        Vec3d(uniform_double(k, 20) - 0.5, uniform_double(k, 21) - 0.5, 1 + uniform_double(k, 22)));
    auto before = project(cam, pose, point);

    Pose rigid = random_pose(hash_counters(13, k));
    Pose moved;
    moved.position = rigid.attitude * pose.position + rigid.position;
    moved.attitude = (rigid.attitude * pose.attitude).normalized();
    Vec3d moved_point = rigid.attitude * point + rigid.position;
    auto after = project(cam, moved, moved_point);

    CHECK(std::abs(before.pixel.x() - after.pixel.x()) < 1e-6);
    CHECK(std::abs(before.pixel.y() - after.pixel.y()) < 1e-6);
  }
}

TEST_CASE("interpolate_pose: endpoints, constancy, and the 22.5 degree case") {
  Trajectory traj;
  Pose a;
  Pose b;
  b.position = Vec3d(10, 0, 0);
  b.attitude = Quatd(Eigen::AngleAxisd(std::numbers::pi / 2, Vec3d::UnitZ()));
  traj.samples = {{0.0, a}, {1.0, b}};

  SUBCASE("sample timestamps return the sample pose exactly") {
    Pose p = interpolate_pose(traj, 1.0);
    CHECK((p.position - b.position).norm() == 0.0);
    CHECK(p.attitude.angularDistance(b.attitude) < 1e-15);
  }

  SUBCASE("quarter point: linear position, 22.5 degree slerp") {
    Pose p = interpolate_pose(traj, 0.25);
    CHECK((p.position - Vec3d(2.5, 0, 0)).norm() < 1e-12);
    Eigen::AngleAxisd aa(p.attitude);
    CHECK(aa.angle() == doctest::Approx(std::numbers::pi / 8).epsilon(1e-12));
    CHECK(std::abs(std::abs(aa.axis().z()) - 1.0) < 1e-12);
  }

  SUBCASE("identical poses interpolate to themselves") {
    Trajectory constant;
    constant.samples = {{0.0, a}, {1.0, a}};
    Pose p = interpolate_pose(constant, 0.37);
    CHECK((p.position - a.position).norm() == 0.0);
    CHECK(p.attitude.angularDistance(a.attitude) < 1e-15);
  }

  SUBCASE("outside the span is an error, not extrapolation") {
    try {
      interpolate_pose(traj, 1.5);
      FAIL("expected out-of-range");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::out_of_range);
    }
  }

  SUBCASE("attitude stays unit norm across the span") {
    for (int i = 0; i <= 100; ++i) {
      Pose p = interpolate_pose(traj, i / 100.0);
      CHECK(std::abs(p.attitude.norm() - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("trajectory CSV round trip") {
  Trajectory traj;
  for (int i = 0; i < 5; ++i) {
    TrajectorySample s;
    s.t = i * 0.5;
    s.pose = random_pose(hash_counters(3, static_cast<std::uint64_t>(i)));
    traj.samples.push_back(s);
  }
  std::sort(traj.samples.begin(), traj.samples.end(),
            [](const auto& a, const auto& b) { return a.t < b.t; });

  auto path = std::filesystem::temp_directory_path() / "lunagen_test_traj.csv";
  save_trajectory_csv(traj, path);
  Trajectory loaded = load_trajectory_csv(path);
  REQUIRE(loaded.samples.size() == traj.samples.size());
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    CHECK(loaded.samples[i].t == traj.samples[i].t);
    CHECK((loaded.samples[i].pose.position - traj.samples[i].pose.position).norm() == 0.0);
    CHECK(loaded.samples[i].pose.attitude.angularDistance(traj.samples[i].pose.attitude) < 1e-15);
  }
  std::filesystem::remove(path);
}

TEST_CASE("trajectory validation rejects non-increasing timestamps") {
  Trajectory traj;
  traj.samples = {{1.0, Pose{}}, {1.0, Pose{}}};
  CHECK_THROWS_AS(traj.validate(), Error);
}
