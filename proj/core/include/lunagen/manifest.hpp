// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lunagen/geom.hpp"

namespace lunagen {

enum class Scenario { Natural, ManMade };
enum class DatasetKind { Real, Synthetic, Laboratory, SyntheticGAN };

std::string to_string(Scenario s);
std::string to_string(DatasetKind k);
Scenario scenario_from_string(const std::string& s);
DatasetKind dataset_kind_from_string(const std::string& s);

/// One dataset frame. File paths are relative to the manifest directory and
/// may be empty for metadata-only manifests (archival descriptions with no
/// files on disk). checksums maps a referenced path to its FNV-1a 64 hex.
struct FrameRecord {
  std::string frame_id;
  double t = 0.0;
  std::string sequence;  // sub-trajectory id; empty = single sequence
  std::string image_path;
  std::string depth_path;
  std::string flow_to_next_path;
  std::string flow_mask_path;
  std::optional<Pose> pose;
  std::map<std::string, std::string> checksums;
};

struct SequenceCount {
  std::string sequence;
  std::size_t count = 0;
};

struct DatasetManifest {
  std::string dataset_id;
  Scenario scenario = Scenario::Natural;
  DatasetKind kind = DatasetKind::Synthetic;
  std::string description;
  std::vector<FrameRecord> frames;
  std::string config_snapshot_json = "{}";

  std::size_t frame_count() const { return frames.size(); }
  /// Per-sequence counts in order of first appearance.
  std::vector<SequenceCount> sequence_counts() const;
};

/// Assembles and checks a manifest. Duplicate frame ids or an empty frame list
/// are errors. With compute_checksums, every referenced file (resolved against
/// base_dir) is hashed; a missing file is an error.
DatasetManifest build_manifest(const std::string& dataset_id, Scenario scenario, DatasetKind kind,
                               const std::string& description, std::vector<FrameRecord> frames,
                               const std::string& config_snapshot_json,
                               const std::filesystem::path& base_dir, bool compute_checksums);

/// Canonical JSON form: keys sorted, shortest round-trip float formatting;
/// serialization round-trips byte-stably.
std::string manifest_to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const std::string& text);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest load_manifest(const std::filesystem::path& path);

struct ValidationOptions {
  bool check_files = true;        // existence + checksums
  bool check_dimensions = true;   // image/depth sizes against the camera model
  bool check_consistency = true;  // recompute flow from depth + poses on a sample
  int consistency_samples = 2;
  double consistency_threshold_px = 1e-3;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool all_passed() const;
  std::string to_json() const;
};

/// Validates a manifest on disk. Nothing here is fatal: every failure becomes
/// a failed check in the report.
ValidationReport validate_dataset(const std::filesystem::path& manifest_path,
                                  const ValidationOptions& options = {});

std::uint64_t fnv1a64_file(const std::filesystem::path& path);
std::string checksum_hex(std::uint64_t value);

}  // namespace lunagen
