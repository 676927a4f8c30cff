// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "lunagen/geom.hpp"
#include "lunagen/image.hpp"

namespace lunagen {

/// Dense forward optical flow (frame A -> frame B) at integer pixel centers of
/// A, with a per-pixel validity mask. Invalid pixels carry (0, 0).
struct FlowField {
  int width = 0;
  int height = 0;
  std::vector<float> u, v;
  std::vector<std::uint8_t> valid;  // 1 = valid

  FlowField() = default;
  FlowField(int w, int h)
      : width(w),
        height(h),
        u(static_cast<std::size_t>(w) * h, 0.0f),
        v(static_cast<std::size_t>(w) * h, 0.0f),
        valid(static_cast<std::size_t>(w) * h, 0) {}
  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
};

/// Exact flow from depth + poses: backproject each pixel of A with its depth,
/// reproject into B. A pixel is valid iff the reprojection lands inside B's
/// bounds, in front of B, and its depth agrees with B's depth map within
/// occlusion_tol (default: max(0.5 m, 1e-3 * depth), scale-aware).
FlowField compute_flow(const ImageF& depth_a, const Pose& pose_a, const Pose& pose_b,
                       const CameraModel& camera, const ImageF& depth_b,
                       std::optional<double> occlusion_tol = std::nullopt);

// Middlebury .flo: float magic 202021.25, int32 width, int32 height, then
// row-major interleaved float32 (u, v). Invalid pixels are written as the
// 1e9 sentinel; a companion 8-bit PNG carries the validity mask (255 = valid).
constexpr float kFloMagic = 202021.25f;
constexpr float kFloInvalidSentinel = 1e9f;

void save_flow(const FlowField& flow, const std::filesystem::path& flo_path,
               const std::filesystem::path& mask_png_path);
FlowField load_flo(const std::filesystem::path& flo_path);

/// Backward warp: result(p) = source(p + flow(p)) by bilinear lookup. Pixels
/// that are invalid or sample outside the source are NaN.
ImageF warp_image(const ImageF& source, const FlowField& flow);

}  // namespace lunagen
