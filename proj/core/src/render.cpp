// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0

#include "lunagen/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>

#include <nlohmann/json.hpp>

#include "lunagen/error.hpp"
#include "lunagen/hash.hpp"
#include "lunagen/raster.hpp"
#include "lunagen/threading.hpp"

namespace lunagen {

using nlohmann::json;

void RenderConfig::validate() const {
  require(supersampling >= 1, Errc::invalid_argument, "render: supersampling must be >= 1");
  require(gain > 0.0, Errc::invalid_argument, "render: gain must be positive");
  require(bit_depth == 8 || bit_depth == 16, Errc::invalid_argument,
          "render: bit depth must be 8 or 16");
  require(read_noise_dn >= 0.0, Errc::invalid_argument, "render: negative read noise");
}

namespace {

void check_camera_above_terrain(const Scene& scene, const Pose& pose) {
  const DemGrid& dem = scene.dem();
  if (dem.contains(pose.position.x(), pose.position.y())) {
    double ground = sample_height_clamped(dem, pose.position.x(), pose.position.y());
    require(pose.position.z() > ground, Errc::invalid_argument,
            "render: camera is on or below the terrain");
  }
}

/// Mean radiance over the n x n jittered subsamples of one pixel.
double pixel_radiance(const Scene& scene, const CameraModel& camera, const Pose& pose,
                      const RenderConfig& cfg, std::uint64_t frame_index, int px, int py) {
  const int n = cfg.supersampling;
  double sum = 0.0;
  for (int sy = 0; sy < n; ++sy) {
    for (int sx = 0; sx < n; ++sx) {
      const std::uint64_t sample = static_cast<std::uint64_t>(sy) * n + sx;
      const std::uint64_t h = hash_counters(cfg.seed, frame_index, static_cast<std::uint64_t>(px),
                                            static_cast<std::uint64_t>(py), sample);
      const double jx = to_unit_double(h);
      const double jy = to_unit_double(mix64(h ^ 0x51d7348bull));
      const Vec2d pixel(px + (sx + jx) / n - 0.5, py + (sy + jy) / n - 0.5);
      const Ray ray = pixel_ray(camera, pose, pixel);
      if (auto hit = scene.trace_ray(ray)) sum += shade(scene, *hit, ray, cfg.shadows);
    }
  }
  return sum / static_cast<double>(n * n);
}

}  // namespace

ImageF render_radiance(const Scene& scene, const CameraModel& camera, const Pose& pose,
                       const RenderConfig& cfg, std::uint64_t frame_index) {
  camera.validate();
  pose.validate();
  cfg.validate();
  check_camera_above_terrain(scene, pose);

  ImageF out(camera.width, camera.height);
  parallel_for_chunks(static_cast<std::size_t>(camera.height), 0,
                      [&](std::size_t r0, std::size_t r1) {
    for (std::size_t row = r0; row < r1; ++row) {
      for (int px = 0; px < camera.width; ++px) {
        double radiance = pixel_radiance(scene, camera, pose, cfg, frame_index, px,
                                         static_cast<int>(row));
        out.at(px, static_cast<int>(row)) = static_cast<float>(cfg.gain * radiance);
      }
    }
  });
  return out;
}

RenderedFrame render_frame(const Scene& scene, const CameraModel& camera, const Pose& pose,
                           const RenderConfig& cfg, std::uint64_t frame_index) {
  camera.validate();
  pose.validate();
  cfg.validate();
  check_camera_above_terrain(scene, pose);

  RenderedFrame frame;
  frame.bit_depth = cfg.bit_depth;
  frame.image = ImageU16(camera.width, camera.height);
  frame.depth = ImageF(camera.width, camera.height, std::numeric_limits<float>::infinity());
  const long max_dn = (1L << cfg.bit_depth) - 1;

  parallel_for_chunks(static_cast<std::size_t>(camera.height), 0,
                      [&](std::size_t r0, std::size_t r1) {
    for (std::size_t row = r0; row < r1; ++row) {
      const int py = static_cast<int>(row);
      for (int px = 0; px < camera.width; ++px) {
        double value =
            cfg.gain * pixel_radiance(scene, camera, pose, cfg, frame_index, px, py);
        if (cfg.read_noise_dn > 0.0) {
          // Box-Muller from two counter-derived uniforms.
          const std::uint64_t h = hash_counters(cfg.seed, frame_index,
                                                static_cast<std::uint64_t>(px),
                                                static_cast<std::uint64_t>(py),
                                                std::uint64_t{0xA015Eull});
          double u1 = std::max(to_unit_double(h), 1e-300);
          double u2 = to_unit_double(mix64(h ^ 0x9c2ba7f1ull));
          double gauss = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
          value += cfg.read_noise_dn * gauss;
        }
        long dn = std::lround(value);
        frame.image.at(px, py) = static_cast<std::uint16_t>(std::clamp(dn, 0L, max_dn));

        // Depth from the unjittered center ray.
        const Vec3d dir_cam = pixel_direction(camera, Vec2d(px, py));
        const Ray center{pose.position, pose.attitude * dir_cam};
        if (auto hit = scene.trace_ray(center))
          frame.depth.at(px, py) = static_cast<float>(hit->t * dir_cam.z());
      }
    }
  });
  return frame;
}

void save_frame_png(const RenderedFrame& frame, const std::filesystem::path& path) {
  if (frame.bit_depth == 16) {
    save_png(frame.image, path);
    return;
  }
  ImageU8 img8(frame.image.width, frame.image.height);
  for (std::size_t i = 0; i < frame.image.pixels.size(); ++i)
    img8.pixels[i] = static_cast<std::uint8_t>(std::min<std::uint16_t>(frame.image.pixels[i], 255));
  save_png(img8, path);
}

void save_depth_raster(const ImageF& depth, const std::filesystem::path& raster_path) {
  // Depth maps reuse the raw raster container; the georeferencing fields are
  // pixel units.
  RasterGeoref georef{depth.width, depth.height, 1.0, 0.0, 0.0};
  save_raster_f32(raster_path, sidecar_header_path(raster_path), georef, depth.pixels);
}

namespace {

json pose_to_json(const Pose& pose) {
  return json::array({pose.position.x(), pose.position.y(), pose.position.z(), pose.attitude.w(),
                      pose.attitude.x(), pose.attitude.y(), pose.attitude.z()});
}

Pose pose_from_json(const json& j) {
  Pose pose;
  pose.position = Vec3d(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
  pose.attitude =
      Quatd(j[3].get<double>(), j[4].get<double>(), j[5].get<double>(), j[6].get<double>());
  return pose;
}

}  // namespace

std::vector<FrameRecord> render_trajectory(const Scene& scene, const CameraModel& camera,
                                           const Trajectory& traj,
                                           const std::vector<double>& frame_times,
                                           const RenderConfig& cfg,
                                           const TrajectoryRenderOptions& options) {
  traj.validate();
  cfg.validate();
  namespace fs = std::filesystem;
  fs::create_directories(options.out_dir / "images");
  fs::create_directories(options.out_dir / "depth");

  const fs::path state_path = options.out_dir / "render_state.json";
  json state = json::object();
  if (options.resume && fs::exists(state_path)) {
    std::ifstream in(state_path);
    try {
      in >> state;
    } catch (const json::exception&) {
      state = json::object();  // corrupt state: re-render everything
    }
  }

  std::vector<FrameRecord> records;
  records.reserve(frame_times.size());
  for (std::size_t i = 0; i < frame_times.size(); ++i) {
    char id[64];
    std::snprintf(id, sizeof(id), "%s%06zu", options.frame_prefix.c_str(), i);
    const std::string frame_id(id);
    const std::string image_rel = "images/" + frame_id + ".png";
    const std::string depth_rel = "depth/" + frame_id + ".f32";
    const fs::path image_path = options.out_dir / image_rel;
    const fs::path depth_path = options.out_dir / depth_rel;

    FrameRecord record;
    record.frame_id = frame_id;
    record.t = frame_times[i];
    record.image_path = image_rel;
    record.depth_path = depth_rel;

    bool reused = false;
    if (options.resume && state.contains(frame_id)) {
      const json& entry = state[frame_id];
      if (fs::exists(image_path) && fs::exists(depth_path) &&
          entry.value("image_checksum", "") == checksum_hex(fnv1a64_file(image_path)) &&
          entry.value("depth_checksum", "") == checksum_hex(fnv1a64_file(depth_path))) {
        record.pose = pose_from_json(entry.at("pose"));
        reused = true;
      }
    }

    if (!reused) {
      const Pose pose = interpolate_pose(traj, frame_times[i]);
      RenderedFrame frame = render_frame(scene, camera, pose, cfg, i);
      save_frame_png(frame, image_path);
      save_depth_raster(frame.depth, depth_path);
      record.pose = pose;

      json entry;
      entry["t"] = frame_times[i];
      entry["pose"] = pose_to_json(pose);
      entry["image_checksum"] = checksum_hex(fnv1a64_file(image_path));
      entry["depth_checksum"] = checksum_hex(fnv1a64_file(depth_path));
      state[frame_id] = entry;
      std::ofstream out(state_path, std::ios::trunc);
      out << state.dump(2) << "\n";
    }
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace lunagen
