// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "lunagen/geom.hpp"
#include "lunagen/image.hpp"
#include "lunagen/manifest.hpp"
#include "lunagen/scene.hpp"

namespace lunagen {

struct RenderConfig {
  int supersampling = 1;       // n: n x n jittered samples per pixel
  bool shadows = true;
  double gain = 1.0;           // DN per W m^-2 sr^-1
  int bit_depth = 16;          // 8 or 16
  std::uint64_t seed = 0;
  double read_noise_dn = 0.0;  // optional additive Gaussian read noise, sigma in DN

  void validate() const;
};

struct RenderedFrame {
  ImageU16 image;  // values clamped to the configured bit depth
  ImageF depth;    // camera-frame z of the center ray, +Inf on miss
  int bit_depth = 16;
};

/// Pre-quantization digital numbers (gain * mean radiance over the subpixel
/// samples), without read noise or clamping. Used by the photometric fit and
/// by radiometric tests.
ImageF render_radiance(const Scene& scene, const CameraModel& camera, const Pose& pose,
                       const RenderConfig& cfg, std::uint64_t frame_index = 0);

/// Quantized frame plus depth map. Subpixel jitter derives from
/// hash(seed, frame_index, px, py, sample); output is byte-identical for any
/// worker count. Throws when the camera sits on or below the terrain.
RenderedFrame render_frame(const Scene& scene, const CameraModel& camera, const Pose& pose,
                           const RenderConfig& cfg, std::uint64_t frame_index = 0);

void save_frame_png(const RenderedFrame& frame, const std::filesystem::path& path);
void save_depth_raster(const ImageF& depth, const std::filesystem::path& raster_path);

struct TrajectoryRenderOptions {
  std::filesystem::path out_dir;
  std::string frame_prefix = "frame_";
  bool resume = true;  // skip frames whose outputs exist with matching checksums
};

/// Renders each requested time along the interpolated trajectory, writing
/// images to <out>/images and depth rasters to <out>/depth. A state file
/// (render_state.json) records per-frame checksums so interrupted runs resume.
std::vector<FrameRecord> render_trajectory(const Scene& scene, const CameraModel& camera,
                                           const Trajectory& traj,
                                           const std::vector<double>& frame_times,
                                           const RenderConfig& cfg,
                                           const TrajectoryRenderOptions& options);

}  // namespace lunagen
