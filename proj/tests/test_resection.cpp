// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0

#include "lunagen/resection.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "lunagen/hash.hpp"

using namespace lunagen;

namespace {

const LandmarkSet kLandmarks = {
    {"L0", Vec3d(100.0, 200.0, 0.0)},
    {"L1", Vec3d(-150.0, 80.0, 10.0)},
    {"L2", Vec3d(40.0, -120.0, -5.0)},
    {"L3", Vec3d(-60.0, -90.0, 25.0)},
};

Pose true_pose(std::uint64_t k) {
  Pose pose;
  pose.position = Vec3d(20.0 * uniform_double(k, 0) - 10.0, 20.0 * uniform_double(k, 1) - 10.0,
                        300.0 + 50.0 * uniform_double(k, 2));
  pose.attitude = Quatd(Eigen::AngleAxisd(std::numbers::pi, Vec3d::UnitX())) *
                  Quatd(Eigen::AngleAxisd(0.2 * uniform_double(k, 3) - 0.1, Vec3d::UnitZ()));
  pose.attitude.normalize();
  return pose;
}

std::vector<LosObservation> observe(const Pose& pose, const std::string& frame_id) {
  std::vector<LosObservation> obs;
  for (const auto& [id, point] : kLandmarks) {
    LosObservation o;
    o.frame_id = frame_id;
    o.landmark_id = id;
    o.direction = pose.world_to_camera(point).normalized();
    obs.push_back(o);
  }
  return obs;
}

Pose perturb(const Pose& pose, double meters, double radians, std::uint64_t k) {
  Pose out = pose;
  Vec3d dp(uniform_double(k, 10) - 0.5, uniform_double(k, 11) - 0.5, uniform_double(k, 12) - 0.5);
  out.position += meters * dp.normalized();
  Vec3d axis(uniform_double(k, 13) - 0.5, uniform_double(k, 14) - 0.5,
             uniform_double(k, 15) - 0.5);
  out.attitude = (out.attitude * Quatd(Eigen::AngleAxisd(radians, axis.normalized()))).normalized();
  return out;
}

}  // namespace

TEST_CASE("invert_los: truth initialization is a fixed point") {
  Pose truth = true_pose(1);
  auto obs = observe(truth, "f0");
  auto result = invert_los(obs, kLandmarks, {{"f0", 0.0, truth}});
  REQUIRE(result.report.size() == 1);
  CHECK(result.report[0].rms_residual < 1e-12);
  CHECK(result.report[0].converged);
  CHECK((result.trajectory.samples[0].pose.position - truth.position).norm() < 1e-9);
}

TEST_CASE("invert_los: recovers from a 10 m / 5 degree perturbation") {
  for (std::uint64_t k = 0; k < 10; ++k) {
    Pose truth = true_pose(100 + k);
    auto obs = observe(truth, "f");
    Pose init = perturb(truth, 10.0, 5.0 * std::numbers::pi / 180.0, k);
    auto result = invert_los(obs, kLandmarks, {{"f", 0.0, init}});
    const Pose& got = result.trajectory.samples[0].pose;
    CHECK((got.position - truth.position).norm() < 1e-6);
    CHECK(got.attitude.angularDistance(truth.attitude) < 1e-8);
    CHECK(result.report[0].rms_residual < 1e-10);
  }
}

TEST_CASE("invert_los: two landmarks are unobservable") {
  Pose truth = true_pose(2);
  auto obs = observe(truth, "f0");
  obs.resize(2);
  try {
    invert_los(obs, kLandmarks, {{"f0", 0.0, truth}});
    FAIL("expected unobservable-frame error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unobservable_frame);
  }
}

TEST_CASE("invert_los: collinear landmarks are unobservable") {
  LandmarkSet line = {{"A", Vec3d(0, 0, 0)}, {"B", Vec3d(10, 0, 0)}, {"C", Vec3d(20, 0, 0)},
                      {"D", Vec3d(35, 0, 0)}};
  Pose truth = true_pose(3);
  std::vector<LosObservation> obs;
  for (const auto& [id, point] : line)
    obs.push_back(LosObservation{"f0", id, truth.world_to_camera(point).normalized()});
  CHECK_THROWS_AS(invert_los(obs, line, {{"f0", 0.0, truth}}), Error);
}

TEST_CASE("los_jacobian matches central finite differences") {
  for (std::uint64_t k = 0; k < 20; ++k) {
    Pose pose = perturb(true_pose(500 + k), 5.0, 0.05, k);
    FrameObservations obs;
    for (const auto& [id, point] : kLandmarks) {
      obs.landmarks.push_back(point);
      obs.directions.push_back(true_pose(500 + k).world_to_camera(point).normalized());
    }
    Eigen::MatrixXd analytic = los_jacobian(obs, pose);

    const double eps = 1e-7;
    Eigen::MatrixXd numeric(analytic.rows(), 6);
    for (int col = 0; col < 6; ++col) {
      Pose plus = pose, minus = pose;
      Vec3d delta = Vec3d::Zero();
      delta(col % 3) = eps;
      if (col < 3) {
        plus.position += delta;
        minus.position -= delta;
      } else {
        plus.attitude = (pose.attitude * Quatd(Eigen::AngleAxisd(eps, Vec3d::Unit(col - 3))))
                            .normalized();
        minus.attitude = (pose.attitude * Quatd(Eigen::AngleAxisd(-eps, Vec3d::Unit(col - 3))))
                             .normalized();
      }
      numeric.col(col) = (los_residuals(obs, plus) - los_residuals(obs, minus)) / (2.0 * eps);
    }
    double rel = (analytic - numeric).norm() / numeric.norm();
    CHECK(rel < 1e-5);
  }
}

TEST_CASE("invert_los cost is gauge-consistent under a global rigid transform") {
  Pose truth = true_pose(7);
  auto obs = observe(truth, "f0");
  Pose init = perturb(truth, 8.0, 0.05, 99);

  FrameObservations frame;
  for (const auto& o : obs) {
    frame.directions.push_back(o.direction);
    frame.landmarks.push_back(kLandmarks.at(o.landmark_id));
  }
  double cost_before = los_residuals(frame, init).squaredNorm();

  // Apply one rigid transform to landmarks and pose together.
  Quatd rot(Eigen::AngleAxisd(0.7, Vec3d(1, 2, 3).normalized()));
  Vec3d shift(40.0, -25.0, 60.0);
  FrameObservations moved = frame;
  for (auto& lm : moved.landmarks) lm = rot * lm + shift;
  Pose moved_init;
  moved_init.position = rot * init.position + shift;
  moved_init.attitude = (rot * init.attitude).normalized();
  double cost_after = los_residuals(moved, moved_init).squaredNorm();

  CHECK(cost_before == doctest::Approx(cost_after).epsilon(1e-12));
}

TEST_CASE("observation and landmark CSV round trips") {
  Pose truth = true_pose(4);
  auto obs = observe(truth, "frame_7");
  auto dir = std::filesystem::temp_directory_path();
  save_los_csv(obs, dir / "lg_obs.csv");
  auto loaded = load_los_csv(dir / "lg_obs.csv");
  REQUIRE(loaded.size() == obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    CHECK(loaded[i].frame_id == obs[i].frame_id);
    CHECK(loaded[i].landmark_id == obs[i].landmark_id);
    CHECK((loaded[i].direction - obs[i].direction).norm() < 1e-15);
  }

  save_landmarks_csv(kLandmarks, dir / "lg_landmarks.csv");
  LandmarkSet lm = load_landmarks_csv(dir / "lg_landmarks.csv");
  CHECK(lm.size() == kLandmarks.size());
  CHECK((lm.at("L2") - kLandmarks.at("L2")).norm() == 0.0);

  std::filesystem::remove(dir / "lg_obs.csv");
  std::filesystem::remove(dir / "lg_landmarks.csv");
}
