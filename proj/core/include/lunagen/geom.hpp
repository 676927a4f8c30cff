// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <filesystem>
#include <vector>

#include "lunagen/error.hpp"

namespace lunagen {

using Vec2d = Eigen::Vector2d;
using Vec3d = Eigen::Vector3d;
using Mat3d = Eigen::Matrix3d;
using Quatd = Eigen::Quaterniond;

/// Distortion-free pinhole camera. Camera frame: +z boresight, +x right,
/// +y down. Pixel (0, 0) is the center of the top-left pixel.
struct CameraModel {
  int width = 0;
  int height = 0;
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;

  void validate() const;
};

/// Camera pose: position in world meters, attitude as the camera-to-world
/// quaternion (rotates camera-frame vectors into the world frame). All frame
/// conversions live in this module.
struct Pose {
  Vec3d position = Vec3d::Zero();
  Quatd attitude = Quatd::Identity();

  void validate() const;
  Mat3d rotation_world_from_camera() const { return attitude.toRotationMatrix(); }
  Vec3d world_to_camera(const Vec3d& p_world) const {
    return attitude.conjugate() * (p_world - position);
  }
  Vec3d camera_to_world(const Vec3d& p_camera) const {
    return attitude * p_camera + position;
  }
};

struct TrajectorySample {
  double t = 0.0;
  Pose pose;
};

/// Time-ordered pose samples; timestamps strictly increasing.
struct Trajectory {
  std::vector<TrajectorySample> samples;

  void validate() const;
  double t_begin() const { return samples.front().t; }
  double t_end() const { return samples.back().t; }
};

struct Ray {
  Vec3d origin = Vec3d::Zero();
  Vec3d direction = Vec3d::UnitZ();  // unit norm
};

struct Projection {
  Vec2d pixel;
  double depth;  // camera-frame z, meters
};

/// Pinhole projection. Throws Errc::behind_camera when the camera-frame z of
/// the point is <= 1e-9 m. The returned pixel may be outside image bounds.
Projection project(const CameraModel& camera, const Pose& pose, const Vec3d& point_world);

/// Inverse of project: pixel plus camera-frame z-depth back to a world point.
/// Throws Errc::invalid_depth when depth <= 0.
Vec3d backproject(const CameraModel& camera, const Pose& pose, const Vec2d& pixel, double depth);

/// Unit direction in the camera frame through a (possibly fractional) pixel.
Vec3d pixel_direction(const CameraModel& camera, const Vec2d& pixel);

/// World-frame ray from the camera center through a pixel.
Ray pixel_ray(const CameraModel& camera, const Pose& pose, const Vec2d& pixel);

/// Linear position / slerp attitude interpolation at time t. Exact samples at
/// sample timestamps; throws Errc::out_of_range outside [first, last].
Pose interpolate_pose(const Trajectory& traj, double t);

/// Trajectory CSV: header `t,px,py,pz,qw,qx,qy,qz`, one sample per row,
/// quaternion camera-to-world.
Trajectory load_trajectory_csv(const std::filesystem::path& path);
void save_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);

}  // namespace lunagen
