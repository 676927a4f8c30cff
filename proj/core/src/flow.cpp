// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0

#include "lunagen/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "lunagen/error.hpp"
#include "lunagen/threading.hpp"

namespace lunagen {

namespace {

// Bilinear depth lookup; false when any contributing neighbor is non-finite
// (miss sentinel) so silhouettes count as occluded.
bool bilinear_depth(const ImageF& depth, double x, double y, double* out) {
  int x0 = static_cast<int>(std::floor(x));
  int y0 = static_cast<int>(std::floor(y));
  x0 = std::min(std::max(x0, 0), depth.width - 2);
  y0 = std::min(std::max(y0, 0), depth.height - 2);
  double fx = x - x0;
  double fy = y - y0;
  float d00 = depth.at(x0, y0), d10 = depth.at(x0 + 1, y0);
  float d01 = depth.at(x0, y0 + 1), d11 = depth.at(x0 + 1, y0 + 1);
  if (!std::isfinite(d00) || !std::isfinite(d10) || !std::isfinite(d01) || !std::isfinite(d11))
    return false;
  *out = (1.0 - fy) * ((1.0 - fx) * d00 + fx * d10) + fy * ((1.0 - fx) * d01 + fx * d11);
  return true;
}

}  // namespace

FlowField compute_flow(const ImageF& depth_a, const Pose& pose_a, const Pose& pose_b,
                       const CameraModel& camera, const ImageF& depth_b,
                       std::optional<double> occlusion_tol) {
  camera.validate();
  require(depth_a.width == camera.width && depth_a.height == camera.height,
          Errc::dimension_mismatch, "compute_flow: depth A does not match the camera model");
  require(depth_b.width == depth_a.width && depth_b.height == depth_a.height,
          Errc::dimension_mismatch, "compute_flow: depth map dimensions differ");

  FlowField flow(depth_a.width, depth_a.height);
  const Mat3d r_bw = pose_b.attitude.conjugate().toRotationMatrix();

  parallel_for_chunks(static_cast<std::size_t>(depth_a.height), 0,
                      [&](std::size_t row0, std::size_t row1) {
    for (std::size_t row = row0; row < row1; ++row) {
      int y = static_cast<int>(row);
      for (int x = 0; x < depth_a.width; ++x) {
        std::size_t idx = flow.index(x, y);
        double d = depth_a.at(x, y);
        if (!std::isfinite(d) || d <= 0.0) continue;

        Vec3d world = backproject(camera, pose_a, Vec2d(x, y), d);
        Vec3d pc = r_bw * (world - pose_b.position);
        if (pc.z() <= 1e-9) continue;

        double px = camera.fx * pc.x() / pc.z() + camera.cx;
        double py = camera.fy * pc.y() / pc.z() + camera.cy;
        if (px < 0.0 || px > camera.width - 1 || py < 0.0 || py > camera.height - 1) continue;

        double depth_at_b;
        if (!bilinear_depth(depth_b, px, py, &depth_at_b)) continue;
        double tol = occlusion_tol ? *occlusion_tol : std::max(0.5, 1e-3 * pc.z());
        if (std::abs(pc.z() - depth_at_b) > tol) continue;

        flow.u[idx] = static_cast<float>(px - x);
        flow.v[idx] = static_cast<float>(py - y);
        flow.valid[idx] = 1;
      }
    }
  });
  return flow;
}

void save_flow(const FlowField& flow, const std::filesystem::path& flo_path,
               const std::filesystem::path& mask_png_path) {
  require(flow.width >= 1 && flow.height >= 1, Errc::invalid_argument, "save_flow: empty field");
  std::ofstream out(flo_path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::io_error, "cannot write flow file: " + flo_path.string());

  const float magic = kFloMagic;
  const std::int32_t w = flow.width, h = flow.height;
  out.write(reinterpret_cast<const char*>(&magic), 4);
  out.write(reinterpret_cast<const char*>(&w), 4);
  out.write(reinterpret_cast<const char*>(&h), 4);
  std::vector<float> row(static_cast<std::size_t>(flow.width) * 2);
  for (int y = 0; y < flow.height; ++y) {
    for (int x = 0; x < flow.width; ++x) {
      std::size_t idx = flow.index(x, y);
      bool ok = flow.valid[idx] != 0;
      row[static_cast<std::size_t>(x) * 2] = ok ? flow.u[idx] : kFloInvalidSentinel;
      row[static_cast<std::size_t>(x) * 2 + 1] = ok ? flow.v[idx] : kFloInvalidSentinel;
    }
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!out) fail(Errc::io_error, "write failed: " + flo_path.string());

  ImageU8 mask(flow.width, flow.height);
  for (std::size_t i = 0; i < flow.valid.size(); ++i) mask.pixels[i] = flow.valid[i] ? 255 : 0;
  save_png(mask, mask_png_path);
}

FlowField load_flo(const std::filesystem::path& flo_path) {
  std::ifstream in(flo_path, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot open flow file: " + flo_path.string());
  float magic = 0.0f;
  std::int32_t w = 0, h = 0;
  in.read(reinterpret_cast<char*>(&magic), 4);
  in.read(reinterpret_cast<char*>(&w), 4);
  in.read(reinterpret_cast<char*>(&h), 4);
  if (!in || magic != kFloMagic)
    fail(Errc::bad_format, "not a .flo file (bad magic): " + flo_path.string());
  require(w >= 1 && h >= 1 && w < 100000 && h < 100000, Errc::bad_format,
          "implausible .flo dimensions in " + flo_path.string());

  FlowField flow(w, h);
  std::vector<float> row(static_cast<std::size_t>(w) * 2);
  for (int y = 0; y < h; ++y) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(float)));
    if (!in) fail(Errc::bad_format, "truncated .flo file: " + flo_path.string());
    for (int x = 0; x < w; ++x) {
      float u = row[static_cast<std::size_t>(x) * 2];
      float v = row[static_cast<std::size_t>(x) * 2 + 1];
      std::size_t idx = flow.index(x, y);
      bool invalid = !(std::abs(u) < kFloInvalidSentinel) || !(std::abs(v) < kFloInvalidSentinel) ||
                     std::isnan(u) || std::isnan(v);
      if (!invalid) {
        flow.u[idx] = u;
        flow.v[idx] = v;
        flow.valid[idx] = 1;
      }
    }
  }
  return flow;
}

ImageF warp_image(const ImageF& source, const FlowField& flow) {
  require(source.width == flow.width && source.height == flow.height, Errc::dimension_mismatch,
          "warp_image: dimensions differ");
  ImageF out(flow.width, flow.height, std::numeric_limits<float>::quiet_NaN());
  for (int y = 0; y < flow.height; ++y) {
    for (int x = 0; x < flow.width; ++x) {
      std::size_t idx = flow.index(x, y);
      if (!flow.valid[idx]) continue;
      double sx = x + flow.u[idx];
      double sy = y + flow.v[idx];
      if (sx < 0.0 || sx > flow.width - 1 || sy < 0.0 || sy > flow.height - 1) continue;
      int x0 = std::min(static_cast<int>(sx), flow.width - 2);
      int y0 = std::min(static_cast<int>(sy), flow.height - 2);
      double fx = sx - x0;
      double fy = sy - y0;
      double value = (1.0 - fy) * ((1.0 - fx) * source.at(x0, y0) + fx * source.at(x0 + 1, y0)) +
                     fy * ((1.0 - fx) * source.at(x0, y0 + 1) + fx * source.at(x0 + 1, y0 + 1));
      out.at(x, y) = static_cast<float>(value);
    }
  }
  return out;
}

}  // namespace lunagen
