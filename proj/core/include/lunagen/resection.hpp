// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "lunagen/geom.hpp"

namespace lunagen {

/// Bearing observation: unit direction from the camera to a landmark,
/// expressed in the camera frame.
struct LosObservation {
  std::string frame_id;
  std::string landmark_id;
  Vec3d direction = Vec3d::UnitZ();
};

using LandmarkSet = std::map<std::string, Vec3d>;

struct InitialFrame {
  std::string frame_id;
  double t = 0.0;
  Pose pose;
};

struct FrameSolveReport {
  std::string frame_id;
  double rms_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::size_t n_observations = 0;
};

struct LosInversionResult {
  Trajectory trajectory;
  std::vector<FrameSolveReport> report;
};

struct LosSolveOptions {
  int max_iterations = 100;
  double step_tolerance = 1e-10;
};

/// Bearings bundled for one frame (directions[i] observes landmarks[i]).
struct FrameObservations {
  std::vector<Vec3d> directions;  // camera frame, unit
  std::vector<Vec3d> landmarks;   // world
};

/// Stacked residuals r_i = d_obs_i - normalize(R_cw (X_i - p)), 3 per bearing.
Eigen::VectorXd los_residuals(const FrameObservations& obs, const Pose& pose);

/// Jacobian of los_residuals w.r.t. [delta_p; delta_theta], with the attitude
/// perturbed on the camera side: R_wc <- R_wc Exp(delta_theta).
Eigen::MatrixXd los_jacobian(const FrameObservations& obs, const Pose& pose);

/// Per-frame pose recovery from bearings by Gauss-Newton with Levenberg
/// damping. Frames are solved independently; a frame with fewer than three
/// observations or collinear landmarks throws Errc::unobservable_frame;
/// non-convergence is flagged in the report, not fatal.
LosInversionResult invert_los(const std::vector<LosObservation>& observations,
                              const LandmarkSet& landmarks,
                              const std::vector<InitialFrame>& initial,
                              const LosSolveOptions& options = {});

/// CSV `frame_id,landmark_id,dx,dy,dz`.
std::vector<LosObservation> load_los_csv(const std::filesystem::path& path);
void save_los_csv(const std::vector<LosObservation>& observations,
                  const std::filesystem::path& path);

/// CSV `landmark_id,x,y,z`.
LandmarkSet load_landmarks_csv(const std::filesystem::path& path);
void save_landmarks_csv(const LandmarkSet& landmarks, const std::filesystem::path& path);

}  // namespace lunagen
