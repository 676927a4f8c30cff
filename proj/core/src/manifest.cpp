// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0

#include "lunagen/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lunagen/error.hpp"
#include "lunagen/flow.hpp"
#include "lunagen/hash.hpp"
#include "lunagen/image.hpp"
#include "lunagen/raster.hpp"

namespace lunagen {

using nlohmann::json;

std::string to_string(Scenario s) { return s == Scenario::Natural ? "Natural" : "ManMade"; }

std::string to_string(DatasetKind k) {
  switch (k) {
    case DatasetKind::Real: return "Real";
    case DatasetKind::Synthetic: return "Synthetic";
    case DatasetKind::Laboratory: return "Laboratory";
    case DatasetKind::SyntheticGAN: return "SyntheticGAN";
  }
  return "Synthetic";
}

Scenario scenario_from_string(const std::string& s) {
  if (s == "Natural") return Scenario::Natural;
  if (s == "ManMade") return Scenario::ManMade;
  fail(Errc::bad_format, "unknown scenario: " + s);
}

DatasetKind dataset_kind_from_string(const std::string& s) {
  if (s == "Real") return DatasetKind::Real;
  if (s == "Synthetic") return DatasetKind::Synthetic;
  if (s == "Laboratory") return DatasetKind::Laboratory;
  if (s == "SyntheticGAN") return DatasetKind::SyntheticGAN;
  fail(Errc::bad_format, "unknown dataset kind: " + s);
}

std::vector<SequenceCount> DatasetManifest::sequence_counts() const {
  std::vector<SequenceCount> counts;
  for (const auto& f : frames) {
    auto it = std::find_if(counts.begin(), counts.end(),
                           [&](const SequenceCount& c) { return c.sequence == f.sequence; });
    if (it == counts.end())
      counts.push_back(SequenceCount{f.sequence, 1});
    else
      ++it->count;
  }
  return counts;
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot open for checksum: " + path.string());
  std::uint64_t h = kFnvOffset;
  char buf[65536];
  while (in) {
    in.read(buf, sizeof(buf));
    h = fnv1a64(reinterpret_cast<const unsigned char*>(buf),
                static_cast<std::size_t>(in.gcount()), h);
  }
  return h;
}

std::string checksum_hex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return std::string(buf);
}

DatasetManifest build_manifest(const std::string& dataset_id, Scenario scenario, DatasetKind kind,
                               const std::string& description, std::vector<FrameRecord> frames,
                               const std::string& config_snapshot_json,
                               const std::filesystem::path& base_dir, bool compute_checksums) {
  require(!dataset_id.empty(), Errc::invalid_argument, "manifest: empty dataset id");
  require(!frames.empty(), Errc::invalid_argument, "manifest: empty frame list");
  std::set<std::string> ids;
  for (const auto& f : frames) {
    require(!f.frame_id.empty(), Errc::invalid_argument, "manifest: empty frame id");
    require(ids.insert(f.frame_id).second, Errc::invalid_argument,
            "manifest: duplicate frame id '" + f.frame_id + "'");
  }

  DatasetManifest manifest;
  manifest.dataset_id = dataset_id;
  manifest.scenario = scenario;
  manifest.kind = kind;
  manifest.description = description;
  manifest.config_snapshot_json = config_snapshot_json.empty() ? "{}" : config_snapshot_json;
  require(json::accept(manifest.config_snapshot_json), Errc::bad_format,
          "manifest: config snapshot is not valid JSON");

  if (compute_checksums) {
    for (auto& f : frames) {
      for (const std::string* rel :
           {&f.image_path, &f.depth_path, &f.flow_to_next_path, &f.flow_mask_path}) {
        if (rel->empty()) continue;
        auto full = base_dir / *rel;
        if (!std::filesystem::exists(full))
          fail(Errc::io_error, "manifest: missing file " + full.string());
        f.checksums[*rel] = checksum_hex(fnv1a64_file(full));
        // Depth rasters carry a sidecar header that travels with them.
        if (rel == &f.depth_path) {
          auto header = sidecar_header_path(full);
          if (std::filesystem::exists(header)) {
            auto rel_header = sidecar_header_path(std::filesystem::path(*rel));
            f.checksums[rel_header.generic_string()] = checksum_hex(fnv1a64_file(header));
          }
        }
      }
    }
  }
  manifest.frames = std::move(frames);
  return manifest;
}

namespace {

json frame_to_json(const FrameRecord& f) {
  json j;
  j["frame_id"] = f.frame_id;
  j["t"] = f.t;
  if (!f.sequence.empty()) j["sequence"] = f.sequence;
  if (!f.image_path.empty()) j["image"] = f.image_path;
  if (!f.depth_path.empty()) j["depth"] = f.depth_path;
  if (!f.flow_to_next_path.empty()) j["flow_to_next"] = f.flow_to_next_path;
  if (!f.flow_mask_path.empty()) j["flow_mask"] = f.flow_mask_path;
  if (f.pose) {
    j["pose"] = {f.pose->position.x(), f.pose->position.y(), f.pose->position.z(),
                 f.pose->attitude.w(), f.pose->attitude.x(), f.pose->attitude.y(),
                 f.pose->attitude.z()};
  }
  if (!f.checksums.empty()) j["checksums"] = f.checksums;
  return j;
}

FrameRecord frame_from_json(const json& j) {
  FrameRecord f;
  f.frame_id = j.at("frame_id").get<std::string>();
  f.t = j.value("t", 0.0);
  f.sequence = j.value("sequence", std::string{});
  f.image_path = j.value("image", std::string{});
  f.depth_path = j.value("depth", std::string{});
  f.flow_to_next_path = j.value("flow_to_next", std::string{});
  f.flow_mask_path = j.value("flow_mask", std::string{});
  if (j.contains("pose")) {
    const auto& p = j["pose"];
    require(p.is_array() && p.size() == 7, Errc::bad_format, "manifest: pose must have 7 values");
    Pose pose;
    pose.position = Vec3d(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
    pose.attitude =
        Quatd(p[3].get<double>(), p[4].get<double>(), p[5].get<double>(), p[6].get<double>());
    f.pose = pose;
  }
  if (j.contains("checksums"))
    f.checksums = j["checksums"].get<std::map<std::string, std::string>>();
  return f;
}

}  // namespace

std::string manifest_to_json(const DatasetManifest& manifest) {
  json j;
  j["dataset_id"] = manifest.dataset_id;
  j["scenario"] = to_string(manifest.scenario);
  j["kind"] = to_string(manifest.kind);
  j["description"] = manifest.description;
  j["frame_count"] = manifest.frame_count();
  json counts = json::object();
  for (const auto& c : manifest.sequence_counts())
    counts[c.sequence.empty() ? "default" : c.sequence] = c.count;
  j["sequence_counts"] = counts;
  j["config"] = json::parse(manifest.config_snapshot_json);
  json frames = json::array();
  for (const auto& f : manifest.frames) frames.push_back(frame_to_json(f));
  j["frames"] = frames;
  return j.dump(2);
}

DatasetManifest manifest_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(Errc::bad_format, std::string("malformed manifest JSON: ") + e.what());
  }
  DatasetManifest m;
  try {
    m.dataset_id = j.at("dataset_id").get<std::string>();
    m.scenario = scenario_from_string(j.at("scenario").get<std::string>());
    m.kind = dataset_kind_from_string(j.at("kind").get<std::string>());
    m.description = j.value("description", std::string{});
    m.config_snapshot_json = j.value("config", json::object()).dump();
    for (const auto& jf : j.at("frames")) m.frames.push_back(frame_from_json(jf));

    // Declared counts must agree with the frame list.
    auto declared = j.at("frame_count").get<std::size_t>();
    require(declared == m.frames.size(), Errc::validation_failure,
            "manifest: declared frame_count " + std::to_string(declared) + " != " +
                std::to_string(m.frames.size()) + " frames");
    if (j.contains("sequence_counts")) {
      auto actual = m.sequence_counts();
      for (const auto& c : actual) {
        std::string key = c.sequence.empty() ? "default" : c.sequence;
        require(j["sequence_counts"].contains(key) &&
                    j["sequence_counts"][key].get<std::size_t>() == c.count,
                Errc::validation_failure, "manifest: sequence count mismatch for '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    fail(Errc::bad_format, std::string("manifest field error: ") + e.what());
  }
  return m;
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(Errc::io_error, "cannot write manifest: " + path.string());
  out << manifest_to_json(manifest) << "\n";
  if (!out) fail(Errc::io_error, "write failed: " + path.string());
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open manifest: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return manifest_from_json(ss.str());
}

bool ValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::string ValidationReport::to_json() const {
  json arr = json::array();
  for (const auto& c : checks)
    arr.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return json{{"checks", arr}, {"all_passed", all_passed()}}.dump(2);
}

namespace {

std::optional<CameraModel> camera_from_snapshot(const std::string& snapshot) {
  try {
    json j = json::parse(snapshot);
    if (!j.contains("camera") || !j["camera"].is_object()) return std::nullopt;
    const auto& c = j["camera"];
    CameraModel cam;
    cam.width = c.at("width").get<int>();
    cam.height = c.at("height").get<int>();
    cam.fx = c.at("fx").get<double>();
    cam.fy = c.at("fy").get<double>();
    cam.cx = c.at("cx").get<double>();
    cam.cy = c.at("cy").get<double>();
    cam.validate();
    return cam;
  } catch (...) {
    return std::nullopt;
  }
}

ImageF depth_from_raster(const std::filesystem::path& raster) {
  RasterGeoref g;
  auto values = load_raster_f32(raster, sidecar_header_path(raster), &g);
  ImageF img(g.ncols, g.nrows);
  img.pixels = std::move(values);
  return img;
}

}  // namespace

ValidationReport validate_dataset(const std::filesystem::path& manifest_path,
                                  const ValidationOptions& options) {
  ValidationReport report;
  DatasetManifest manifest;
  try {
    manifest = load_manifest(manifest_path);
    std::set<std::string> ids;
    for (const auto& f : manifest.frames)
      require(ids.insert(f.frame_id).second, Errc::validation_failure,
              "duplicate frame id '" + f.frame_id + "'");
    report.checks.push_back({"metadata", true,
                             std::to_string(manifest.frame_count()) + " frames, counts consistent"});
  } catch (const std::exception& e) {
    report.checks.push_back({"metadata", false, e.what()});
    return report;
  }

  const auto base = manifest_path.parent_path();

  if (options.check_files) {
    std::size_t checked = 0;
    std::string failure;
    for (const auto& f : manifest.frames) {
      for (const auto& [rel, expected] : f.checksums) {
        auto full = base / rel;
        if (!std::filesystem::exists(full)) {
          failure = "frame " + f.frame_id + ": missing file " + rel;
          break;
        }
        if (checksum_hex(fnv1a64_file(full)) != expected) {
          failure = "frame " + f.frame_id + ": checksum mismatch for " + rel;
          break;
        }
        ++checked;
      }
      if (!failure.empty()) break;
    }
    report.checks.push_back({"files", failure.empty(),
                             failure.empty() ? std::to_string(checked) + " checksums verified"
                                             : failure});
  }

  auto camera = camera_from_snapshot(manifest.config_snapshot_json);

  if (options.check_dimensions) {
    if (!camera) {
      report.checks.push_back(
          {"dimensions", true, "skipped: no camera model in the config snapshot"});
    } else {
      std::string failure;
      std::size_t checked = 0;
      for (const auto& f : manifest.frames) {
        if (f.image_path.empty()) continue;
        try {
          auto png = load_png_gray(base / f.image_path);
          if (png.width != camera->width || png.height != camera->height) {
            failure = "frame " + f.frame_id + ": image size " + std::to_string(png.width) + "x" +
                      std::to_string(png.height) + " != camera model";
            break;
          }
          ++checked;
        } catch (const std::exception& e) {
          failure = "frame " + f.frame_id + ": " + e.what();
          break;
        }
      }
      report.checks.push_back({"dimensions", failure.empty(),
                               failure.empty() ? std::to_string(checked) + " images match"
                                               : failure});
    }
  }

  if (options.check_consistency) {
    if (!camera) {
      report.checks.push_back(
          {"flow_consistency", true, "skipped: no camera model in the config snapshot"});
    } else {
      // Sample frame pairs that have a stored flow-to-next.
      std::vector<std::size_t> candidates;
      for (std::size_t i = 0; i + 1 < manifest.frames.size(); ++i) {
        const auto& a = manifest.frames[i];
        const auto& b = manifest.frames[i + 1];
        if (!a.flow_to_next_path.empty() && !a.depth_path.empty() && !b.depth_path.empty() &&
            a.pose && b.pose && a.sequence == b.sequence)
          candidates.push_back(i);
      }
      if (candidates.empty()) {
        report.checks.push_back({"flow_consistency", true, "skipped: no flow pairs"});
      } else {
        std::string failure;
        std::size_t checked = 0;
        std::size_t step = std::max<std::size_t>(
            1, candidates.size() / static_cast<std::size_t>(std::max(1, options.consistency_samples)));
        for (std::size_t k = 0; k < candidates.size() && checked < static_cast<std::size_t>(
                                                              std::max(1, options.consistency_samples));
             k += step) {
          const auto& a = manifest.frames[candidates[k]];
          const auto& b = manifest.frames[candidates[k] + 1];
          try {
            ImageF depth_a = depth_from_raster(base / a.depth_path);
            ImageF depth_b = depth_from_raster(base / b.depth_path);
            FlowField stored = load_flo(base / a.flow_to_next_path);
            FlowField recomputed = compute_flow(depth_a, *a.pose, *b.pose, *camera, depth_b);
            require(stored.width == recomputed.width && stored.height == recomputed.height,
                    Errc::dimension_mismatch, "stored flow dimensions differ");
            double sum = 0.0;
            std::size_t n = 0;
            for (std::size_t i = 0; i < stored.u.size(); ++i) {
              if (!stored.valid[i] || !recomputed.valid[i]) continue;
              sum += std::hypot(stored.u[i] - recomputed.u[i], stored.v[i] - recomputed.v[i]);
              ++n;
            }
            if (n == 0) {
              failure = "frame " + a.frame_id + ": no jointly valid flow pixels";
              break;
            }
            double mean = sum / static_cast<double>(n);
            if (mean >= options.consistency_threshold_px) {
              char buf[64];
              std::snprintf(buf, sizeof(buf), "%.6g px", mean);
              failure = "frame " + a.frame_id + ": mean flow deviation " + buf;
              break;
            }
            ++checked;
          } catch (const std::exception& e) {
            failure = "frame " + a.frame_id + ": " + e.what();
            break;
          }
        }
        report.checks.push_back({"flow_consistency", failure.empty(),
                                 failure.empty() ? std::to_string(checked) + " pairs recomputed"
                                                 : failure});
      }
    }
  }
  return report;
}

}  // namespace lunagen
