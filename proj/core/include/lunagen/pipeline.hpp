// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "lunagen/geom.hpp"
#include "lunagen/manifest.hpp"

namespace lunagen {

/// Options for a full pipeline run. The config file (JSON) references the
/// camera, trajectory, DEM source, augmentation, scene photometry, and render
/// settings; every sub-config uses the exact serialized form of the owning
/// module. Relative paths resolve against the config file directory.
struct PipelineOptions {
  std::filesystem::path out_dir;
  std::optional<std::uint64_t> seed_override;
  int threads = 0;  // 0 keeps the current global cap
};

struct PipelineResult {
  std::filesystem::path manifest_path;
  ValidationReport validation;
  std::filesystem::path run_log_path;
};

/// Executes dem -> augment -> render -> flow -> manifest -> validate. Stage
/// wall times and seeds go to <out>/run_log.json (the only output carrying
/// timing); any stage error aborts with Errc::stage_failure naming the stage.
/// Identical config + seed produce byte-identical datasets.
PipelineResult run_pipeline(const std::filesystem::path& config_path,
                            const PipelineOptions& options);

/// Camera JSON: { "width", "height", "fx", "fy", "cx", "cy" }.
CameraModel load_camera_json(const std::filesystem::path& path);
std::string camera_to_json(const CameraModel& camera);

/// Frame time list "t0:t1:dt" (inclusive of t1 up to rounding).
std::vector<double> parse_frame_times(const std::string& spec);

}  // namespace lunagen
