// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0
//
// lunagen - command-line entry point for the lunar landing dataset toolkit.
// Subcommands: dem, augment, render, flow, invert-los, capture, bench,
// dataset, run. Exit codes: 0 success, 2 validation failure, 1 error.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lunagen/capture.hpp"
#include "lunagen/dem.hpp"
#include "lunagen/epe.hpp"
#include "lunagen/error.hpp"
#include "lunagen/flow.hpp"
#include "lunagen/manifest.hpp"
#include "lunagen/pipeline.hpp"
#include "lunagen/procedural.hpp"
#include "lunagen/raster.hpp"
#include "lunagen/render.hpp"
#include "lunagen/resection.hpp"
#include "lunagen/scene.hpp"
#include "lunagen/threading.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lunagen;

namespace {

std::vector<double> parse_csv_numbers(const std::string& text, std::size_t min_fields,
                                      std::size_t max_fields, const std::string& what) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) values.push_back(std::stod(field));
  require(values.size() >= min_fields && values.size() <= max_fields, Errc::invalid_argument,
          what + ": expected " + std::to_string(min_fields) + ".." + std::to_string(max_fields) +
              " comma-separated values");
  return values;
}

DemGrid load_dem_sidecar(const fs::path& raster) {
  return load_dem(raster, sidecar_header_path(raster));
}

/// Reference views for capture: PNGs in lexical order paired with trajectory
/// rows in file order.
std::vector<ReferenceView> load_reference_views(const fs::path& refs_dir,
                                                const fs::path& poses_csv) {
  std::vector<fs::path> pngs;
  for (const auto& entry : fs::directory_iterator(refs_dir))
    if (entry.path().extension() == ".png") pngs.push_back(entry.path());
  std::sort(pngs.begin(), pngs.end());
  require(!pngs.empty(), Errc::invalid_argument, "no PNG references in " + refs_dir.string());

  Trajectory poses = load_trajectory_csv(poses_csv);
  require(poses.samples.size() == pngs.size(), Errc::dimension_mismatch,
          "reference count != pose count");

  std::vector<ReferenceView> views;
  for (std::size_t i = 0; i < pngs.size(); ++i) {
    GrayPng png = load_png_gray(pngs[i]);
    ReferenceView view;
    view.image_dn = ImageF(png.width, png.height);
    for (std::size_t k = 0; k < png.pixels.size(); ++k)
      view.image_dn.pixels[k] = static_cast<float>(png.pixels[k]);
    view.pose = poses.samples[i].pose;
    view.frame_index = i;
    views.push_back(std::move(view));
  }
  return views;
}

struct RenderArgs {
  std::string scene, traj, camera, frames, out;
  int supersampling = 1;
  bool shadows = true;
  double gain = 1.0;
  int bit_depth = 16;
  std::uint64_t seed = 0;
  std::string dataset_id = "RENDER";
};

void run_render(const RenderArgs& args) {
  Scene scene = load_scene(args.scene);
  CameraModel camera = load_camera_json(args.camera);
  Trajectory traj = load_trajectory_csv(args.traj);
  std::vector<double> times = parse_frame_times(args.frames);

  RenderConfig cfg;
  cfg.supersampling = args.supersampling;
  cfg.shadows = args.shadows;
  cfg.gain = args.gain;
  cfg.bit_depth = args.bit_depth;
  cfg.seed = args.seed;

  TrajectoryRenderOptions options;
  options.out_dir = args.out;
  auto records = render_trajectory(scene, camera, traj, times, cfg, options);

  json snapshot;
  snapshot["camera"] = json::parse(camera_to_json(camera));
  snapshot["render"] = {{"supersampling", cfg.supersampling}, {"shadows", cfg.shadows},
                        {"gain", cfg.gain},                   {"bit_depth", cfg.bit_depth},
                        {"seed", cfg.seed}};
  DatasetManifest manifest =
      build_manifest(args.dataset_id, Scenario::Natural, DatasetKind::Synthetic,
                     "rendered with lunagen render", records, snapshot.dump(), args.out, true);
  save_manifest(manifest, fs::path(args.out) / "manifest.json");
  std::cout << "rendered " << records.size() << " frames into " << args.out << "\n";
}

void run_flow(const std::string& manifest_path_str, double occlusion_tol) {
  fs::path manifest_path(manifest_path_str);
  DatasetManifest manifest = load_manifest(manifest_path);
  fs::path base = manifest_path.parent_path();

  json snapshot = json::parse(manifest.config_snapshot_json);
  require(snapshot.contains("camera"), Errc::bad_format,
          "manifest config snapshot has no camera model");
  CameraModel camera;
  camera.width = snapshot["camera"].at("width").get<int>();
  camera.height = snapshot["camera"].at("height").get<int>();
  camera.fx = snapshot["camera"].at("fx").get<double>();
  camera.fy = snapshot["camera"].at("fy").get<double>();
  camera.cx = snapshot["camera"].at("cx").get<double>();
  camera.cy = snapshot["camera"].at("cy").get<double>();
  camera.validate();

  std::optional<double> tol;
  if (occlusion_tol > 0.0) tol = occlusion_tol;

  fs::create_directories(base / "flow");
  std::size_t pairs = 0;
  for (std::size_t i = 0; i + 1 < manifest.frames.size(); ++i) {
    auto& a = manifest.frames[i];
    const auto& b = manifest.frames[i + 1];
    if (a.depth_path.empty() || b.depth_path.empty() || !a.pose || !b.pose ||
        a.sequence != b.sequence)
      continue;
    RasterGeoref g;
    auto va = load_raster_f32(base / a.depth_path, sidecar_header_path(base / a.depth_path), &g);
    ImageF depth_a(g.ncols, g.nrows);
    depth_a.pixels = std::move(va);
    auto vb = load_raster_f32(base / b.depth_path, sidecar_header_path(base / b.depth_path), &g);
    ImageF depth_b(g.ncols, g.nrows);
    depth_b.pixels = std::move(vb);

    FlowField flow = compute_flow(depth_a, *a.pose, *b.pose, camera, depth_b, tol);
    std::string flo_rel = "flow/" + a.frame_id + ".flo";
    std::string mask_rel = "flow/" + a.frame_id + "_mask.png";
    save_flow(flow, base / flo_rel, base / mask_rel);
    a.flow_to_next_path = flo_rel;
    a.flow_mask_path = mask_rel;
    a.checksums[flo_rel] = checksum_hex(fnv1a64_file(base / flo_rel));
    a.checksums[mask_rel] = checksum_hex(fnv1a64_file(base / mask_rel));
    ++pairs;
  }
  save_manifest(manifest, manifest_path);
  std::cout << "computed flow for " << pairs << " frame pairs\n";
}

void run_invert_los(const std::string& obs_path, const std::string& landmarks_path,
                    const std::string& init_path, const std::string& out_path,
                    const std::string& report_path, int max_iters, double step_tol) {
  auto observations = load_los_csv(obs_path);
  auto landmarks = load_landmarks_csv(landmarks_path);
  Trajectory init = load_trajectory_csv(init_path);

  // Frame ids in order of first appearance pair with init rows in file order.
  std::vector<std::string> frame_ids;
  for (const auto& obs : observations)
    if (std::find(frame_ids.begin(), frame_ids.end(), obs.frame_id) == frame_ids.end())
      frame_ids.push_back(obs.frame_id);
  require(frame_ids.size() == init.samples.size(), Errc::dimension_mismatch,
          "initial trajectory rows (" + std::to_string(init.samples.size()) +
              ") != observed frames (" + std::to_string(frame_ids.size()) + ")");

  std::vector<InitialFrame> initial;
  for (std::size_t i = 0; i < frame_ids.size(); ++i)
    initial.push_back(InitialFrame{frame_ids[i], init.samples[i].t, init.samples[i].pose});

  LosSolveOptions options;
  options.max_iterations = max_iters;
  options.step_tolerance = step_tol;
  LosInversionResult result = invert_los(observations, landmarks, initial, options);
  save_trajectory_csv(result.trajectory, out_path);

  if (!report_path.empty()) {
    json arr = json::array();
    for (const auto& r : result.report)
      arr.push_back({{"frame_id", r.frame_id},
                     {"rms_residual", r.rms_residual},
                     {"iterations", r.iterations},
                     {"converged", r.converged},
                     {"n_observations", r.n_observations}});
    std::ofstream out(report_path, std::ios::trunc);
    out << arr.dump(2) << "\n";
  }
  std::cout << "recovered " << result.trajectory.samples.size() << " poses\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lunagen: validated synthetic lunar landing datasets from DEMs"};
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads, "Cap worker threads globally (default: hardware)");
  // Apply the global cap before any subcommand callback runs.
  app.immediate_callback();
  app.callback([&] {
    if (threads > 0) set_max_threads(threads);
  });

  int exit_code = 0;

  // ---- dem ----
  auto* dem_cmd = app.add_subcommand("dem", "DEM fusion and utilities");
  dem_cmd->require_subcommand(1);

  struct {
    std::string low, high, out;
    double feather_m = -1.0;
    bool offset_correct = true;
  } fuse_args;
  auto* dem_fuse = dem_cmd->add_subcommand("fuse", "Merge a high-res DEM into a low-res DEM");
  dem_fuse->add_option("--low", fuse_args.low, "Low-res raster (.f32 with .json sidecar)")
      ->required();
  dem_fuse->add_option("--high", fuse_args.high, "High-res raster")->required();
  dem_fuse->add_option("--feather-m", fuse_args.feather_m,
                       "Feather width in meters (default: 20 output cells)");
  dem_fuse->add_flag("--offset-correct,!--no-offset-correct", fuse_args.offset_correct,
                     "Shift high by mean(low - high) first (default on)");
  dem_fuse->add_option("--out", fuse_args.out, "Output raster")->required();
  dem_fuse->callback([&] {
    DemGrid low = load_dem_sidecar(fuse_args.low);
    DemGrid high = load_dem_sidecar(fuse_args.high);
    FusionConfig cfg;
    cfg.feather_width = fuse_args.feather_m >= 0.0 ? fuse_args.feather_m : 20.0 * high.cell_size;
    cfg.offset_correction = fuse_args.offset_correct;
    DemGrid fused = fuse(low, high, cfg);
    save_dem(fused, fuse_args.out, sidecar_header_path(fuse_args.out));
    std::cout << "fused " << fused.ncols << "x" << fused.nrows << " @ " << fused.cell_size
              << " m\n";
  });

  struct {
    int ncols = 64, nrows = 64, octaves = 3;
    double cell = 5.0, ox = 0.0, oy = 0.0, base = 0.0;
    double amplitude = 8.0, wavelength = 80.0, persistence = 0.5, lacunarity = 2.0;
    std::uint64_t seed = 0;
    std::string out;
  } synth_args;
  auto* dem_synth = dem_cmd->add_subcommand("synth", "Synthesize a Perlin-based demo DEM");
  dem_synth->add_option("--ncols", synth_args.ncols);
  dem_synth->add_option("--nrows", synth_args.nrows);
  dem_synth->add_option("--cell-size", synth_args.cell);
  dem_synth->add_option("--origin-x", synth_args.ox);
  dem_synth->add_option("--origin-y", synth_args.oy);
  dem_synth->add_option("--base-height", synth_args.base);
  dem_synth->add_option("--amplitude", synth_args.amplitude);
  dem_synth->add_option("--wavelength", synth_args.wavelength);
  dem_synth->add_option("--octaves", synth_args.octaves);
  dem_synth->add_option("--persistence", synth_args.persistence);
  dem_synth->add_option("--lacunarity", synth_args.lacunarity);
  dem_synth->add_option("--seed", synth_args.seed);
  dem_synth->add_option("--out", synth_args.out)->required();
  dem_synth->callback([&] {
    DemGrid flat;
    flat.ncols = synth_args.ncols;
    flat.nrows = synth_args.nrows;
    flat.cell_size = synth_args.cell;
    flat.origin_x = synth_args.ox;
    flat.origin_y = synth_args.oy;
    flat.heights.assign(static_cast<std::size_t>(flat.ncols) * flat.nrows, synth_args.base);
    NoiseSpec spec{synth_args.amplitude, synth_args.wavelength, synth_args.octaves,
                   synth_args.persistence, synth_args.lacunarity, synth_args.seed};
    DemGrid dem = add_perlin(flat, spec);
    save_dem(dem, synth_args.out, sidecar_header_path(synth_args.out));
    std::cout << "synthesized " << dem.ncols << "x" << dem.nrows << " DEM\n";
  });

  struct {
    std::string path;
  } info_args;
  auto* dem_info = dem_cmd->add_subcommand("info", "Print DEM header and height range");
  dem_info->add_option("raster", info_args.path)->required();
  dem_info->callback([&] {
    DemGrid dem = load_dem_sidecar(info_args.path);
    auto [lo, hi] = std::minmax_element(dem.heights.begin(), dem.heights.end());
    std::cout << dem.ncols << "x" << dem.nrows << " @ " << dem.cell_size << " m, origin ("
              << dem.origin_x << ", " << dem.origin_y << "), heights [" << *lo << ", " << *hi
              << "] m\n";
  });

  // ---- augment ----
  struct {
    std::string dem, out, craters, boulders, perlin, boulders_out;
    std::uint64_t seed = 0;
  } aug_args;
  auto* augment = app.add_subcommand("augment", "Add craters, boulders, and Perlin noise");
  augment->add_option("--dem", aug_args.dem, "Input raster")->required();
  augment->add_option("--craters", aug_args.craters, "density,rmin,rmax,exponent");
  augment->add_option("--boulders", aug_args.boulders, "density,rmin,rmax,exponent");
  augment->add_option("--perlin", aug_args.perlin, "amp,wavelength,octaves[,persistence[,lacunarity]]");
  augment->add_option("--seed", aug_args.seed, "Augmentation seed");
  augment->add_option("--out", aug_args.out, "Output raster")->required();
  augment->add_option("--boulders-out", aug_args.boulders_out,
                      "Boulder field JSON (default: <out>.boulders.json)");
  augment->callback([&] {
    DemGrid dem = load_dem_sidecar(aug_args.dem);
    Extent region = dem_extent(dem);
    if (!aug_args.craters.empty()) {
      auto v = parse_csv_numbers(aug_args.craters, 4, 4, "--craters");
      CraterField field = generate_craters(region, v[0], v[1], v[2], v[3],
                                           hash_string(aug_args.seed, "augment.craters"));
      dem = apply_craters(dem, field);
      std::cout << "applied " << field.craters.size() << " craters\n";
    }
    if (!aug_args.perlin.empty()) {
      auto v = parse_csv_numbers(aug_args.perlin, 3, 5, "--perlin");
      NoiseSpec spec;
      spec.amplitude = v[0];
      spec.base_wavelength = v[1];
      spec.octaves = static_cast<int>(v[2]);
      if (v.size() > 3) spec.persistence = v[3];
      if (v.size() > 4) spec.lacunarity = v[4];
      spec.seed = hash_string(aug_args.seed, "augment.perlin");
      dem = add_perlin(dem, spec);
      std::cout << "added Perlin noise, amplitude " << spec.amplitude << " m\n";
    }
    BoulderField boulders;
    if (!aug_args.boulders.empty()) {
      auto v = parse_csv_numbers(aug_args.boulders, 4, 4, "--boulders");
      boulders = generate_boulders(region, v[0], v[1], v[2], v[3],
                                   hash_string(aug_args.seed, "augment.boulders"));
      std::cout << "generated " << boulders.boulders.size() << " boulders\n";
    }
    save_dem(dem, aug_args.out, sidecar_header_path(aug_args.out));
    fs::path bpath = aug_args.boulders_out.empty() ? fs::path(aug_args.out + ".boulders.json")
                                                   : fs::path(aug_args.boulders_out);
    std::ofstream bout(bpath, std::ios::trunc);
    bout << to_json_string(boulders) << "\n";
  });

  // ---- render ----
  RenderArgs render_args;
  auto* render = app.add_subcommand("render", "Render a trajectory over a scene");
  render->add_option("--scene", render_args.scene)->required();
  render->add_option("--traj", render_args.traj)->required();
  render->add_option("--camera", render_args.camera)->required();
  render->add_option("--frames", render_args.frames, "t0:t1:dt")->required();
  render->add_option("--ss", render_args.supersampling, "Supersampling n (n x n per pixel)");
  render->add_flag("--shadows,!--no-shadows", render_args.shadows, "Shadow rays (default on)");
  render->add_option("--gain", render_args.gain, "DN per W/m^2/sr");
  render->add_option("--bit-depth", render_args.bit_depth)->check(CLI::IsMember({8, 16}));
  render->add_option("--seed", render_args.seed);
  render->add_option("--dataset-id", render_args.dataset_id);
  render->add_option("--out", render_args.out)->required();
  render->callback([&] { run_render(render_args); });

  // ---- flow ----
  struct {
    std::string manifest;
    double occlusion_tol = 0.0;
  } flow_args;
  auto* flow_cmd = app.add_subcommand("flow", "Compute ground-truth flow for a rendered dataset");
  flow_cmd->add_option("--manifest", flow_args.manifest)->required();
  flow_cmd->add_option("--occlusion-tol", flow_args.occlusion_tol,
                       "Occlusion tolerance in meters (default: scale-aware)");
  flow_cmd->callback([&] { run_flow(flow_args.manifest, flow_args.occlusion_tol); });

  // ---- invert-los ----
  struct {
    std::string obs, landmarks, init, out, report;
    int max_iters = 100;
    double step_tol = 1e-10;
  } los_args;
  auto* invert = app.add_subcommand("invert-los", "Recover a trajectory from bearings");
  invert->add_option("--observations", los_args.obs, "CSV frame_id,landmark_id,dx,dy,dz")
      ->required();
  invert->add_option("--landmarks", los_args.landmarks, "CSV landmark_id,x,y,z")->required();
  invert->add_option("--init", los_args.init, "Initial guess trajectory CSV")->required();
  invert->add_option("--out", los_args.out, "Recovered trajectory CSV")->required();
  invert->add_option("--report", los_args.report, "Per-frame residual report JSON");
  invert->add_option("--max-iters", los_args.max_iters);
  invert->add_option("--step-tol", los_args.step_tol);
  invert->callback([&] {
    run_invert_los(los_args.obs, los_args.landmarks, los_args.init, los_args.out, los_args.report,
                   los_args.max_iters, los_args.step_tol);
  });

  // ---- capture ----
  auto* capture = app.add_subcommand("capture", "Photometric model capture");
  capture->require_subcommand(1);

  struct {
    std::string refs, scene, camera, poses, free = "w", out;
    double gain = 1.0;
    int ss = 1, max_iters = 200;
    double step_tol = 1e-6;
    std::uint64_t seed = 0;
  } fit_args;
  auto* fit = capture->add_subcommand("fit", "Fit BRDF parameters against reference images");
  fit->add_option("--refs", fit_args.refs, "Directory of reference PNGs")->required();
  fit->add_option("--scene", fit_args.scene)->required();
  fit->add_option("--camera", fit_args.camera)->required();
  fit->add_option("--poses", fit_args.poses, "Trajectory CSV, one row per reference")->required();
  fit->add_option("--free", fit_args.free, "Comma list from w,b,B0,h,gain");
  fit->add_option("--gain", fit_args.gain, "Initial gain");
  fit->add_option("--ss", fit_args.ss);
  fit->add_option("--seed", fit_args.seed);
  fit->add_option("--max-iters", fit_args.max_iters);
  fit->add_option("--step-tol", fit_args.step_tol);
  fit->add_option("--out", fit_args.out)->required();
  fit->callback([&] {
    RenderConfig cfg;
    cfg.supersampling = fit_args.ss;
    cfg.gain = fit_args.gain;
    cfg.seed = fit_args.seed;
    std::vector<std::string> free_list;
    std::stringstream ss(fit_args.free);
    std::string name;
    while (std::getline(ss, name, ',')) free_list.push_back(name);
    CaptureProblem problem{load_reference_views(fit_args.refs, fit_args.poses),
                           load_scene(fit_args.scene), load_camera_json(fit_args.camera), cfg,
                           std::move(free_list)};

    FitResult result = fit_brdf(problem, fit_args.max_iters, fit_args.step_tol);
    json out = {{"w", result.params.w},
                {"b", result.params.b},
                {"B0", result.params.B0},
                {"h", result.params.h},
                {"gain", result.gain},
                {"iterations", result.iterations},
                {"converged", result.converged},
                {"warning_diverged", result.warning_diverged},
                {"loss_trace", result.loss_trace}};
    std::ofstream f(fit_args.out, std::ios::trunc);
    f << out.dump(2) << "\n";
    std::cout << "fit: w=" << result.params.w << " b=" << result.params.b
              << " B0=" << result.params.B0 << " h=" << result.params.h
              << " gain=" << result.gain << " (loss " << result.loss_trace.back() << ")\n";
  });

  struct {
    std::string refs, scene, camera, poses, out;
    double gain = 1.0, threshold = 0.01;
    int ss = 1;
    std::uint64_t seed = 0;
  } bp_args;
  auto* backproject = capture->add_subcommand("backproject", "Recover an albedo texture");
  backproject->add_option("--refs", bp_args.refs)->required();
  backproject->add_option("--scene", bp_args.scene)->required();
  backproject->add_option("--camera", bp_args.camera)->required();
  backproject->add_option("--poses", bp_args.poses)->required();
  backproject->add_option("--gain", bp_args.gain)->required();
  backproject->add_option("--ss", bp_args.ss, "Supersampling used for the references");
  backproject->add_option("--seed", bp_args.seed, "Render seed used for the references");
  backproject->add_option("--threshold", bp_args.threshold, "Shading cutoff fraction");
  backproject->add_option("--out", bp_args.out, "Output raster (.f32)")->required();
  backproject->callback([&] {
    auto views = load_reference_views(bp_args.refs, bp_args.poses);
    Scene scene = load_scene(bp_args.scene);
    CameraModel camera = load_camera_json(bp_args.camera);
    RenderConfig cfg;
    cfg.gain = bp_args.gain;
    cfg.supersampling = bp_args.ss;
    cfg.seed = bp_args.seed;
    TexelGrid grid = backproject_textures(views, camera, scene, cfg, bp_args.threshold);
    fs::path out(bp_args.out);
    fs::path mask = out;
    mask.replace_extension();
    mask += "_valid.png";
    save_texel_grid(grid, out, mask);
    std::size_t n_valid = 0;
    for (auto v : grid.valid) n_valid += v;
    std::cout << "recovered " << n_valid << " / " << grid.valid.size() << " texels\n";
  });

  // ---- bench ----
  auto* bench = app.add_subcommand("bench", "Benchmark predictions against ground truth");
  bench->require_subcommand(1);

  struct {
    std::string pred, manifest, out;
  } epe_args;
  auto* epe_cmd = bench->add_subcommand("epe", "End-point error of predicted flow");
  epe_cmd->add_option("--pred", epe_args.pred, "Directory of <frame_id>.flo predictions")
      ->required();
  epe_cmd->add_option("--manifest", epe_args.manifest)->required();
  epe_cmd->add_option("--out", epe_args.out, "Report JSON")->required();
  epe_cmd->callback([&] {
    DatasetManifest manifest = load_manifest(epe_args.manifest);
    fs::path base = fs::path(epe_args.manifest).parent_path();

    FlowField pooled_pred, pooled_gt;
    pooled_pred.height = pooled_gt.height = 1;
    json per_frame = json::array();
    for (const auto& f : manifest.frames) {
      if (f.flow_to_next_path.empty()) continue;
      FlowField gt = load_flo(base / f.flow_to_next_path);
      FlowField pred = load_flo(fs::path(epe_args.pred) / (f.frame_id + ".flo"));
      EpeReport report = epe(pred, gt);
      per_frame.push_back({{"frame_id", f.frame_id},
                           {"report", json::parse(epe_report_to_json(report))}});
      // EPE is permutation invariant, so pairs pool into one flat field.
      require(pred.width == gt.width && pred.height == gt.height, Errc::dimension_mismatch,
              "prediction dimensions differ from ground truth");
      pooled_pred.u.insert(pooled_pred.u.end(), pred.u.begin(), pred.u.end());
      pooled_pred.v.insert(pooled_pred.v.end(), pred.v.begin(), pred.v.end());
      pooled_pred.valid.insert(pooled_pred.valid.end(), pred.valid.begin(), pred.valid.end());
      pooled_gt.u.insert(pooled_gt.u.end(), gt.u.begin(), gt.u.end());
      pooled_gt.v.insert(pooled_gt.v.end(), gt.v.begin(), gt.v.end());
      pooled_gt.valid.insert(pooled_gt.valid.end(), gt.valid.begin(), gt.valid.end());
    }
    require(!pooled_gt.u.empty(), Errc::invalid_argument, "manifest has no flow ground truth");
    pooled_pred.width = pooled_gt.width = static_cast<int>(pooled_gt.u.size());
    EpeReport overall = epe(pooled_pred, pooled_gt);

    json out = {{"overall", json::parse(epe_report_to_json(overall))}, {"frames", per_frame}};
    std::ofstream f(epe_args.out, std::ios::trunc);
    f << out.dump(2) << "\n";
    std::cout << "mean EPE " << overall.mean_epe << " px over " << overall.valid_pixels
              << " pixels\n";
  });

  // ---- dataset ----
  auto* dataset = app.add_subcommand("dataset", "Dataset manifest utilities");
  dataset->require_subcommand(1);

  struct {
    std::string manifest;
    bool metadata_only = false;
    int samples = 2;
  } val_args;
  auto* validate = dataset->add_subcommand("validate", "Validate a dataset against its manifest");
  validate->add_option("manifest", val_args.manifest)->required();
  validate->add_flag("--metadata-only", val_args.metadata_only,
                     "Schema and counts only; skip file and consistency checks");
  validate->add_option("--samples", val_args.samples, "Flow consistency sample pairs");
  validate->callback([&] {
    ValidationOptions options;
    if (val_args.metadata_only) {
      options.check_files = false;
      options.check_dimensions = false;
      options.check_consistency = false;
    }
    options.consistency_samples = val_args.samples;
    ValidationReport report = validate_dataset(val_args.manifest, options);
    std::cout << report.to_json() << "\n";
    if (!report.all_passed()) exit_code = 2;
  });

  // ---- run ----
  struct {
    std::string config, out;
    std::uint64_t seed = 0;
    bool seed_set = false;
  } run_args;
  auto* run = app.add_subcommand("run", "Run the full dataset pipeline");
  run->add_option("--config", run_args.config)->required();
  run->add_option("--out", run_args.out)->required();
  auto* seed_opt = run->add_option("--seed", run_args.seed, "Override the config seed");
  run->callback([&] {
    PipelineOptions options;
    options.out_dir = run_args.out;
    if (seed_opt->count() > 0) options.seed_override = run_args.seed;
    options.threads = threads;
    PipelineResult result = run_pipeline(run_args.config, options);
    std::cout << "manifest: " << result.manifest_path.string() << "\n"
              << result.validation.to_json() << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == Errc::validation_failure ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}
