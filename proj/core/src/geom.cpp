// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0

#include "lunagen/geom.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lunagen {

namespace {
constexpr double kMinDepth = 1e-9;
constexpr double kQuatNormTol = 1e-9;
}  // namespace

void CameraModel::validate() const {
  require(width >= 1 && height >= 1, Errc::invalid_argument, "camera: non-positive image size");
  require(fx > 0.0 && fy > 0.0, Errc::invalid_argument, "camera: focal length must be positive");
  require(cx >= 0.0 && cx <= width && cy >= 0.0 && cy <= height, Errc::invalid_argument,
          "camera: principal point outside image");
}

void Pose::validate() const {
  require(position.allFinite(), Errc::invalid_argument, "pose: non-finite position");
  require(std::abs(attitude.norm() - 1.0) <= kQuatNormTol, Errc::invalid_argument,
          "pose: attitude quaternion not unit norm");
}

void Trajectory::validate() const {
  require(!samples.empty(), Errc::invalid_argument, "trajectory: no samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    samples[i].pose.validate();
    require(std::isfinite(samples[i].t), Errc::invalid_argument, "trajectory: non-finite time");
    if (i > 0)
      require(samples[i].t > samples[i - 1].t, Errc::invalid_argument,
              "trajectory: timestamps not strictly increasing");
  }
}

Projection project(const CameraModel& camera, const Pose& pose, const Vec3d& point_world) {
  Vec3d pc = pose.world_to_camera(point_world);
  if (pc.z() <= kMinDepth) fail(Errc::behind_camera, "project: point at or behind camera plane");
  return Projection{Vec2d(camera.fx * pc.x() / pc.z() + camera.cx,
                          camera.fy * pc.y() / pc.z() + camera.cy),
                    pc.z()};
}

Vec3d backproject(const CameraModel& camera, const Pose& pose, const Vec2d& pixel, double depth) {
  if (!(depth > 0.0)) fail(Errc::invalid_depth, "backproject: depth must be positive");
  Vec3d pc((pixel.x() - camera.cx) / camera.fx * depth,
           (pixel.y() - camera.cy) / camera.fy * depth, depth);
  return pose.camera_to_world(pc);
}

Vec3d pixel_direction(const CameraModel& camera, const Vec2d& pixel) {
  Vec3d d((pixel.x() - camera.cx) / camera.fx, (pixel.y() - camera.cy) / camera.fy, 1.0);
  return d.normalized();
}

Ray pixel_ray(const CameraModel& camera, const Pose& pose, const Vec2d& pixel) {
  return Ray{pose.position, pose.attitude * pixel_direction(camera, pixel)};
}

Pose interpolate_pose(const Trajectory& traj, double t) {
  require(!traj.samples.empty(), Errc::invalid_argument, "interpolate_pose: empty trajectory");
  const auto& s = traj.samples;
  if (t < s.front().t || t > s.back().t)
    fail(Errc::out_of_range, "interpolate_pose: t outside trajectory span");

  auto it = std::lower_bound(s.begin(), s.end(), t,
                             [](const TrajectorySample& a, double v) { return a.t < v; });
  if (it != s.end() && it->t == t) return it->pose;
  // it points past the bracket start; t is strictly between (it-1)->t and it->t.
  const TrajectorySample& a = *(it - 1);
  const TrajectorySample& b = *it;
  double f = (t - a.t) / (b.t - a.t);

  Pose out;
  out.position = (1.0 - f) * a.pose.position + f * b.pose.position;
  out.attitude = a.pose.attitude.slerp(f, b.pose.attitude).normalized();
  return out;
}

Trajectory load_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open trajectory file: " + path.string());

  std::string line;
  if (!std::getline(in, line)) fail(Errc::bad_format, "empty trajectory file: " + path.string());
  // Tolerate trailing carriage returns from foreign line endings.
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == "t,px,py,pz,qw,qx,qy,qz", Errc::bad_format,
          "trajectory header mismatch in " + path.string());

  Trajectory traj;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double v[8];
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (int i = 0; i < 8; ++i) {
      auto [next, ec] = std::from_chars(p, end, v[i]);
      if (ec != std::errc{})
        fail(Errc::bad_format, "trajectory parse error at line " + std::to_string(line_no));
      p = next;
      if (i < 7) {
        if (p == end || *p != ',')
          fail(Errc::bad_format, "trajectory parse error at line " + std::to_string(line_no));
        ++p;
      }
    }
    TrajectorySample s;
    s.t = v[0];
    s.pose.position = Vec3d(v[1], v[2], v[3]);
    s.pose.attitude = Quatd(v[4], v[5], v[6], v[7]).normalized();
    traj.samples.push_back(s);
  }
  traj.validate();
  return traj;
}

void save_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
  traj.validate();
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(Errc::io_error, "cannot write trajectory file: " + path.string());
  out << "t,px,py,pz,qw,qx,qy,qz\n";
  char buf[512];
  for (const auto& s : traj.samples) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t,
                  s.pose.position.x(), s.pose.position.y(), s.pose.position.z(),
                  s.pose.attitude.w(), s.pose.attitude.x(), s.pose.attitude.y(),
                  s.pose.attitude.z());
    out << buf;
  }
  if (!out) fail(Errc::io_error, "write failed: " + path.string());
}

}  // namespace lunagen
