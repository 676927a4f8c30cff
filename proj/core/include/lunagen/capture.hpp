// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lunagen/geom.hpp"
#include "lunagen/image.hpp"
#include "lunagen/render.hpp"
#include "lunagen/scene.hpp"

namespace lunagen {

/// Albedo texture recovered by back-projection, one texel per DEM cell.
struct TexelGrid {
  int ncols = 0;
  int nrows = 0;
  double cell_size = 0.0;
  double origin_x = 0.0;
  double origin_y = 0.0;
  std::vector<double> albedo;
  std::vector<double> weight;
  std::vector<std::uint8_t> valid;

  std::size_t index(int col, int row) const {
    return static_cast<std::size_t>(row) * ncols + col;
  }
};

struct ReferenceView {
  ImageF image_dn;             // observed digital numbers as floats
  Pose pose;
  std::uint64_t frame_index = 0;  // jitter stream used when the view was rendered
};

/// Back-projects reference images into texture space. For each pixel with a
/// terrain hit, the unit-albedo shading S = gain * irradiance * brdf is
/// rendered with the same subpixel sampling the references used; unshadowed
/// samples with S above threshold_frac of the maximum shading accumulate
/// observed/S with weight S^2 (variance-optimal for uniform pixel noise).
/// Texels never observed are invalid.
TexelGrid backproject_textures(const std::vector<ReferenceView>& references,
                               const CameraModel& camera, const Scene& scene,
                               const RenderConfig& cfg, double threshold_frac = 0.01);

void save_texel_grid(const TexelGrid& grid, const std::filesystem::path& raster_path,
                     const std::filesystem::path& validity_png_path);

/// Photometric capture problem: fixed geometry, free photometric parameters
/// fitted against reference views. free_parameters is a subset of
/// {"w", "b", "B0", "h", "gain"}.
struct CaptureProblem {
  std::vector<ReferenceView> references;
  Scene scene;
  CameraModel camera;
  RenderConfig render_cfg;  // seed / supersampling / shadows for re-rendering
  std::vector<std::string> free_parameters;
};

struct FitResult {
  HapkeParams params;
  double gain = 1.0;
  std::vector<double> loss_trace;  // monotone non-increasing, length >= 1
  int iterations = 0;
  bool converged = false;
  bool warning_diverged = false;
};

/// Mean squared pixel error between re-rendered and reference views.
double capture_loss(const CaptureProblem& problem, const HapkeParams& params, double gain);

/// Line-search gradient descent over the free parameters with central
/// finite-difference gradients in a log/logit-transformed space (parameters
/// stay in-domain by construction). Stops when the accepted step norm falls
/// below step_tolerance or after max_iters iterations.
FitResult fit_brdf(const CaptureProblem& problem, int max_iters, double step_tolerance = 1e-6);

}  // namespace lunagen
