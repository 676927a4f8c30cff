// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0

#include "lunagen/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lunagen/dem.hpp"
#include "lunagen/error.hpp"
#include "lunagen/flow.hpp"
#include "lunagen/hash.hpp"
#include "lunagen/procedural.hpp"
#include "lunagen/raster.hpp"
#include "lunagen/render.hpp"
#include "lunagen/scene.hpp"
#include "lunagen/threading.hpp"

namespace lunagen {

using nlohmann::json;
namespace fs = std::filesystem;

CameraModel load_camera_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open camera file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(Errc::bad_format, "malformed camera file " + path.string() + ": " + e.what());
  }
  CameraModel cam;
  try {
    cam.width = j.at("width").get<int>();
    cam.height = j.at("height").get<int>();
    cam.fx = j.at("fx").get<double>();
    cam.fy = j.at("fy").get<double>();
    cam.cx = j.at("cx").get<double>();
    cam.cy = j.at("cy").get<double>();
  } catch (const json::exception& e) {
    fail(Errc::bad_format, "camera file " + path.string() + ": " + e.what());
  }
  cam.validate();
  return cam;
}

std::string camera_to_json(const CameraModel& camera) {
  return json{{"width", camera.width}, {"height", camera.height}, {"fx", camera.fx},
              {"fy", camera.fy},       {"cx", camera.cx},         {"cy", camera.cy}}
      .dump(2);
}

std::vector<double> parse_frame_times(const std::string& spec) {
  double t0 = 0.0, t1 = 0.0, dt = 0.0;
  std::istringstream ss(spec);
  char c1 = 0, c2 = 0;
  ss >> t0 >> c1 >> t1 >> c2 >> dt;
  require(static_cast<bool>(ss) && c1 == ':' && c2 == ':', Errc::bad_format,
          "frame spec must be t0:t1:dt, got '" + spec + "'");
  require(dt > 0.0 && t1 >= t0, Errc::invalid_argument, "frame spec: need t1 >= t0 and dt > 0");
  std::size_t n = static_cast<std::size_t>(std::floor((t1 - t0) / dt + 1e-9)) + 1;
  std::vector<double> times(n);
  for (std::size_t i = 0; i < n; ++i) times[i] = t0 + static_cast<double>(i) * dt;
  return times;
}

namespace {

struct StageTimer {
  json* log_stages;
  std::string name;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  bool done = false;

  StageTimer(json* stages, std::string stage_name)
      : log_stages(stages), name(std::move(stage_name)) {}
  void finish(const std::string& status) {
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - start)
                  .count();
    log_stages->push_back({{"name", name}, {"wall_ms", ms}, {"status", status}});
    done = true;
  }
};

json load_json_file(const fs::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, std::string("cannot open ") + what + ": " + path.string());
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    fail(Errc::bad_format, std::string("malformed ") + what + " " + path.string() + ": " + e.what());
  }
}

NoiseSpec noise_spec_from(const json& j, std::uint64_t default_seed) {
  NoiseSpec spec;
  spec.amplitude = j.at("amplitude_m").get<double>();
  spec.base_wavelength = j.at("base_wavelength_m").get<double>();
  spec.octaves = j.value("octaves", 1);
  spec.persistence = j.value("persistence", 0.5);
  spec.lacunarity = j.value("lacunarity", 2.0);
  spec.seed = j.value("seed", default_seed);
  spec.validate();
  return spec;
}

struct FeatureParams {
  double density = 0.0, r_min = 0.0, r_max = 0.0, exponent = 3.0;
};

FeatureParams feature_params_from(const json& j) {
  FeatureParams p;
  p.density = j.at("density_per_km2").get<double>();
  p.r_min = j.at("r_min_m").get<double>();
  p.r_max = j.at("r_max_m").get<double>();
  p.exponent = j.value("power_exponent", 3.0);
  return p;
}

void write_run_log(const fs::path& path, const json& log) {
  std::ofstream out(path, std::ios::trunc);
  out << log.dump(2) << "\n";
}

}  // namespace

PipelineResult run_pipeline(const fs::path& config_path, const PipelineOptions& options) {
  require(!options.out_dir.empty(), Errc::invalid_argument, "pipeline: output directory not set");
  if (options.threads > 0) set_max_threads(options.threads);

  const json config = load_json_file(config_path, "run config");
  const fs::path base = config_path.parent_path();
  auto resolve = [&](const std::string& p) {
    fs::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };

  const std::uint64_t seed =
      options.seed_override ? *options.seed_override : config.value("seed", std::uint64_t{0});

  fs::create_directories(options.out_dir);
  const fs::path run_log_path = options.out_dir / "run_log.json";
  json log;
  log["seed"] = seed;
  log["completed"] = false;
  log["stages"] = json::array();
  json* stages = &log["stages"];

  auto run_stage = [&](const std::string& name, auto&& body) {
    StageTimer timer(stages, name);
    try {
      body();
      timer.finish("ok");
    } catch (const std::exception& e) {
      timer.finish(std::string("failed: ") + e.what());
      log["partial"] = true;
      write_run_log(run_log_path, log);
      fail(Errc::stage_failure, "stage '" + name + "': " + e.what());
    }
  };

  // Stage: dem
  DemGrid dem;
  run_stage("dem", [&] {
    require(config.contains("dem"), Errc::bad_format, "run config missing 'dem'");
    const json& jdem = config["dem"];
    if (jdem.contains("synth")) {
      const json& js = jdem["synth"];
      DemGrid flat;
      flat.ncols = js.at("ncols").get<int>();
      flat.nrows = js.at("nrows").get<int>();
      flat.cell_size = js.at("cell_size_m").get<double>();
      flat.origin_x = js.value("origin_x_m", 0.0);
      flat.origin_y = js.value("origin_y_m", 0.0);
      flat.heights.assign(static_cast<std::size_t>(flat.ncols) * flat.nrows,
                          js.value("base_height_m", 0.0));
      NoiseSpec spec = noise_spec_from(js, hash_string(seed, "dem.synth"));
      dem = add_perlin(flat, spec);
    } else {
      dem = load_dem(resolve(jdem.at("raster").get<std::string>()),
                     resolve(jdem.at("header").get<std::string>()));
    }
    if (jdem.contains("fuse")) {
      const json& jf = jdem["fuse"];
      DemGrid high = load_dem(resolve(jf.at("high").at("raster").get<std::string>()),
                              resolve(jf.at("high").at("header").get<std::string>()));
      FusionConfig fc;
      fc.feather_width = jf.value("feather_m", 20.0 * high.cell_size);
      fc.offset_correction = jf.value("offset_correction", true);
      dem = fuse(dem, high, fc);
    }
  });

  // Stage: augment
  BoulderField boulders;
  run_stage("augment", [&] {
    if (!config.contains("augment")) return;
    const json& ja = config["augment"];
    Extent region = dem_extent(dem);
    if (ja.contains("craters")) {
      FeatureParams p = feature_params_from(ja["craters"]);
      CraterField craters = generate_craters(region, p.density, p.r_min, p.r_max, p.exponent,
                                             hash_string(seed, "augment.craters"));
      dem = apply_craters(dem, craters);
    }
    if (ja.contains("perlin")) {
      NoiseSpec spec = noise_spec_from(ja["perlin"], hash_string(seed, "augment.perlin"));
      dem = add_perlin(dem, spec);
    }
    if (ja.contains("boulders")) {
      FeatureParams p = feature_params_from(ja["boulders"]);
      boulders = generate_boulders(region, p.density, p.r_min, p.r_max, p.exponent,
                                   hash_string(seed, "augment.boulders"));
    }
  });

  // Persist the final terrain + boulder field next to the frames.
  fs::create_directories(options.out_dir / "dem");
  save_dem(dem, options.out_dir / "dem/terrain.f32", options.out_dir / "dem/terrain.json");
  {
    std::ofstream out(options.out_dir / "dem/boulders.json", std::ios::trunc);
    out << to_json_string(boulders) << "\n";
  }

  // Stage: render
  CameraModel camera;
  std::vector<FrameRecord> records;
  std::uint64_t render_seed = hash_string(seed, "render");
  run_stage("render", [&] {
    require(config.contains("camera"), Errc::bad_format, "run config missing 'camera'");
    if (config["camera"].is_string())
      camera = load_camera_json(resolve(config["camera"].get<std::string>()));
    else {
      const json& jc = config["camera"];
      camera.width = jc.at("width").get<int>();
      camera.height = jc.at("height").get<int>();
      camera.fx = jc.at("fx").get<double>();
      camera.fy = jc.at("fy").get<double>();
      camera.cx = jc.at("cx").get<double>();
      camera.cy = jc.at("cy").get<double>();
      camera.validate();
    }
    Trajectory traj = load_trajectory_csv(resolve(config.at("trajectory").get<std::string>()));

    std::vector<double> frame_times;
    if (config.at("frames").is_string())
      frame_times = parse_frame_times(config["frames"].get<std::string>());
    else
      for (const auto& t : config["frames"]) frame_times.push_back(t.get<double>());

    require(config.contains("scene"), Errc::bad_format, "run config missing 'scene'");
    const json& js = config["scene"];
    HapkeParams hapke;
    if (js.contains("hapke")) {
      const json& jh = js["hapke"];
      hapke.w = jh.value("w", hapke.w);
      hapke.b = jh.value("b", hapke.b);
      hapke.B0 = jh.value("B0", hapke.B0);
      hapke.h = jh.value("h", hapke.h);
    }
    const auto& jsun = js.at("sun_direction");
    Vec3d sun(jsun[0].get<double>(), jsun[1].get<double>(), jsun[2].get<double>());
    std::optional<DemGrid> albedo;
    if (js.contains("albedo_texture") && !js["albedo_texture"].is_null())
      albedo = load_dem(resolve(js["albedo_texture"].at("raster").get<std::string>()),
                        resolve(js["albedo_texture"].at("header").get<std::string>()));
    Scene scene = Scene::build(dem, boulders, hapke, sun, js.value("sun_irradiance", 1361.0),
                               std::move(albedo));

    RenderConfig rc;
    if (config.contains("render")) {
      const json& jr = config["render"];
      rc.supersampling = jr.value("supersampling", 1);
      rc.shadows = jr.value("shadows", true);
      rc.gain = jr.value("gain", 1.0);
      rc.bit_depth = jr.value("bit_depth", 16);
      rc.read_noise_dn = jr.value("read_noise_dn", 0.0);
    }
    rc.seed = render_seed;

    TrajectoryRenderOptions ro;
    ro.out_dir = options.out_dir;
    records = render_trajectory(scene, camera, traj, frame_times, rc, ro);
  });

  // Stage: flow (ground truth between consecutive frames)
  run_stage("flow", [&] {
    if (records.size() < 2) return;
    std::optional<double> tol;
    if (config.contains("flow") && config["flow"].contains("occlusion_tol_m"))
      tol = config["flow"]["occlusion_tol_m"].get<double>();
    fs::create_directories(options.out_dir / "flow");
    for (std::size_t i = 0; i + 1 < records.size(); ++i) {
      RasterGeoref g;
      auto va = load_raster_f32(options.out_dir / records[i].depth_path,
                                sidecar_header_path(options.out_dir / records[i].depth_path), &g);
      ImageF depth_a(g.ncols, g.nrows);
      depth_a.pixels = std::move(va);
      auto vb =
          load_raster_f32(options.out_dir / records[i + 1].depth_path,
                          sidecar_header_path(options.out_dir / records[i + 1].depth_path), &g);
      ImageF depth_b(g.ncols, g.nrows);
      depth_b.pixels = std::move(vb);

      FlowField flow =
          compute_flow(depth_a, *records[i].pose, *records[i + 1].pose, camera, depth_b, tol);
      std::string flo_rel = "flow/" + records[i].frame_id + ".flo";
      std::string mask_rel = "flow/" + records[i].frame_id + "_mask.png";
      save_flow(flow, options.out_dir / flo_rel, options.out_dir / mask_rel);
      records[i].flow_to_next_path = flo_rel;
      records[i].flow_mask_path = mask_rel;
    }
  });

  // Stage: manifest
  fs::path manifest_path = options.out_dir / "manifest.json";
  run_stage("manifest", [&] {
    json snapshot = config;
    snapshot["seed"] = seed;
    snapshot["camera"] = json::parse(camera_to_json(camera));
    snapshot["sub_seeds"] = {{"render", render_seed},
                             {"augment.craters", hash_string(seed, "augment.craters")},
                             {"augment.boulders", hash_string(seed, "augment.boulders")},
                             {"augment.perlin", hash_string(seed, "augment.perlin")}};
    DatasetManifest manifest = build_manifest(
        config.value("dataset_id", std::string("DATASET")),
        scenario_from_string(config.value("scenario", std::string("Natural"))),
        dataset_kind_from_string(config.value("kind", std::string("Synthetic"))),
        config.value("description", std::string{}), records, snapshot.dump(), options.out_dir,
        /*compute_checksums=*/true);
    save_manifest(manifest, manifest_path);
  });

  // Stage: validate
  PipelineResult result;
  result.manifest_path = manifest_path;
  result.run_log_path = run_log_path;
  run_stage("validate", [&] {
    result.validation = validate_dataset(manifest_path);
    if (!result.validation.all_passed())
      fail(Errc::validation_failure, "dataset validation failed:\n" + result.validation.to_json());
  });

  log["completed"] = true;
  write_run_log(run_log_path, log);
  return result;
}

}  // namespace lunagen
