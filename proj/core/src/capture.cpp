// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0

#include "lunagen/capture.hpp"

#include <algorithm>
#include <cmath>

#include "lunagen/error.hpp"
#include "lunagen/hapke.hpp"
#include "lunagen/raster.hpp"

namespace lunagen {

namespace {

struct TexelSample {
  std::size_t texel = 0;
  double shading = 0.0;
  double observed = 0.0;
};

}  // namespace

TexelGrid backproject_textures(const std::vector<ReferenceView>& references,
                               const CameraModel& camera, const Scene& scene,
                               const RenderConfig& cfg, double threshold_frac) {
  require(!references.empty(), Errc::invalid_argument, "backproject: no reference images");
  camera.validate();
  cfg.validate();

  const DemGrid& dem = scene.dem();
  TexelGrid grid;
  grid.ncols = dem.ncols;
  grid.nrows = dem.nrows;
  grid.cell_size = dem.cell_size;
  grid.origin_x = dem.origin_x;
  grid.origin_y = dem.origin_y;
  grid.albedo.assign(static_cast<std::size_t>(grid.ncols) * grid.nrows, 0.0);
  grid.weight.assign(grid.albedo.size(), 0.0);
  grid.valid.assign(grid.albedo.size(), 0);

  const Scene unit_scene = scene.with_albedo_texture(std::nullopt);

  std::vector<TexelSample> samples;
  double s_max = 0.0;
  for (const auto& view : references) {
    require(view.image_dn.width == camera.width && view.image_dn.height == camera.height,
            Errc::dimension_mismatch, "backproject: reference image does not match camera");
    view.pose.validate();
    // Unit-albedo shading with the view's own jitter stream, so observed / S
    // divides out the per-pixel sampling exactly.
    ImageF shading = render_radiance(unit_scene, camera, view.pose, cfg, view.frame_index);
    for (int py = 0; py < camera.height; ++py) {
      for (int px = 0; px < camera.width; ++px) {
        const Ray ray = pixel_ray(camera, view.pose, Vec2d(px, py));
        auto hit = scene.trace_ray(ray);
        if (!hit || hit->object != kTerrainObject) continue;
        if (hit->normal.dot(scene.sun_direction()) <= 0.0) continue;
        const Vec3d shadow_origin = hit->point + 1e-3 * dem.cell_size * hit->normal;
        if (scene.occluded(shadow_origin, scene.sun_direction())) continue;

        double s = shading.at(px, py);
        if (s <= 0.0) continue;

        int col = std::clamp(
            static_cast<int>(std::lround((hit->point.x() - dem.origin_x) / dem.cell_size)), 0,
            dem.ncols - 1);
        int row = std::clamp(
            static_cast<int>(std::lround((hit->point.y() - dem.origin_y) / dem.cell_size)), 0,
            dem.nrows - 1);
        samples.push_back(TexelSample{grid.index(col, row), s, view.image_dn.at(px, py)});
        s_max = std::max(s_max, s);
      }
    }
  }
  require(s_max > 0.0, Errc::no_signal, "backproject: no illuminated terrain visible");

  std::vector<double> numerator(grid.albedo.size(), 0.0);
  const double cutoff = threshold_frac * s_max;
  for (const auto& s : samples) {
    if (s.shading <= cutoff) continue;
    numerator[s.texel] += s.shading * s.observed;
    grid.weight[s.texel] += s.shading * s.shading;
  }
  for (std::size_t i = 0; i < grid.albedo.size(); ++i) {
    if (grid.weight[i] > 0.0) {
      grid.albedo[i] = numerator[i] / grid.weight[i];
      grid.valid[i] = 1;
    }
  }
  return grid;
}

void save_texel_grid(const TexelGrid& grid, const std::filesystem::path& raster_path,
                     const std::filesystem::path& validity_png_path) {
  RasterGeoref georef{grid.ncols, grid.nrows, grid.cell_size, grid.origin_x, grid.origin_y};
  std::vector<float> values(grid.albedo.begin(), grid.albedo.end());
  save_raster_f32(raster_path, sidecar_header_path(raster_path), georef, values);
  ImageU8 mask(grid.ncols, grid.nrows);
  for (std::size_t i = 0; i < grid.valid.size(); ++i) mask.pixels[i] = grid.valid[i] ? 255 : 0;
  save_png(mask, validity_png_path);
}

namespace {

enum class FreeParam { W, B, B0, H, Gain };

FreeParam parse_free_param(const std::string& name) {
  if (name == "w") return FreeParam::W;
  if (name == "b") return FreeParam::B;
  if (name == "B0") return FreeParam::B0;
  if (name == "h") return FreeParam::H;
  if (name == "gain") return FreeParam::Gain;
  fail(Errc::invalid_argument, "fit_brdf: unknown free parameter '" + name + "'");
}

// log/logit transforms keep every trial point inside the parameter domain.
double to_transform(FreeParam p, const HapkeParams& params, double gain) {
  switch (p) {
    case FreeParam::W: {
      double w = std::clamp(params.w, 1e-9, 1.0 - 1e-9);
      return std::log(w / (1.0 - w));
    }
    case FreeParam::B: {
      double b = std::clamp(params.b, -1.0 + 1e-9, 1.0 - 1e-9);
      return std::atanh(b);
    }
    case FreeParam::B0: return std::log(std::max(params.B0, 1e-12));
    case FreeParam::H: return std::log(params.h);
    case FreeParam::Gain: return std::log(gain);
  }
  return 0.0;
}

// Clamps guard the open-interval boundaries against float rounding when the
// line search probes extreme transform values.
void from_transform(FreeParam p, double value, HapkeParams* params, double* gain) {
  switch (p) {
    case FreeParam::W:
      params->w = std::clamp(1.0 / (1.0 + std::exp(-value)), 1e-12, 1.0);
      break;
    case FreeParam::B:
      params->b = std::clamp(std::tanh(value), -1.0 + 1e-12, 1.0 - 1e-12);
      break;
    case FreeParam::B0: params->B0 = std::clamp(std::exp(value), 1e-12, 1e12); break;
    case FreeParam::H: params->h = std::clamp(std::exp(value), 1e-12, 1e12); break;
    case FreeParam::Gain: *gain = std::clamp(std::exp(value), 1e-12, 1e12); break;
  }
}

}  // namespace

double capture_loss(const CaptureProblem& problem, const HapkeParams& params, double gain) {
  require(!problem.references.empty(), Errc::invalid_argument, "capture: no reference images");
  Scene scene = problem.scene.with_photometry(params);
  RenderConfig cfg = problem.render_cfg;
  cfg.gain = gain;
  cfg.read_noise_dn = 0.0;

  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& view : problem.references) {
    ImageF rendered = render_radiance(scene, problem.camera, view.pose, cfg, view.frame_index);
    for (std::size_t i = 0; i < rendered.pixels.size(); ++i) {
      double diff = static_cast<double>(rendered.pixels[i]) - view.image_dn.pixels[i];
      sum += diff * diff;
    }
    count += rendered.pixels.size();
  }
  return sum / static_cast<double>(count);
}

FitResult fit_brdf(const CaptureProblem& problem, int max_iters, double step_tolerance) {
  require(!problem.references.empty(), Errc::invalid_argument, "fit_brdf: no reference images");
  require(!problem.free_parameters.empty(), Errc::invalid_argument,
          "fit_brdf: no free parameters");
  problem.camera.validate();
  problem.scene.hapke().validate();

  double ref_max = 0.0;
  for (const auto& view : problem.references)
    for (float v : view.image_dn.pixels) ref_max = std::max(ref_max, static_cast<double>(v));
  require(ref_max > 0.0, Errc::no_signal, "fit_brdf: reference images carry no signal");

  std::vector<FreeParam> free;
  free.reserve(problem.free_parameters.size());
  for (const auto& name : problem.free_parameters) free.push_back(parse_free_param(name));
  const std::size_t dim = free.size();

  HapkeParams params = problem.scene.hapke();
  double gain = problem.render_cfg.gain;

  std::vector<double> theta(dim);
  for (std::size_t i = 0; i < dim; ++i) theta[i] = to_transform(free[i], params, gain);

  auto loss_at = [&](const std::vector<double>& t) {
    HapkeParams p = params;
    double g = gain;
    for (std::size_t i = 0; i < dim; ++i) from_transform(free[i], t[i], &p, &g);
    return capture_loss(problem, p, g);
  };

  FitResult result;
  double loss = loss_at(theta);
  result.loss_trace.push_back(loss);
  double best_loss = loss;
  std::vector<double> best_theta = theta;

  double step_scale = 1.0;
  constexpr double kFdDelta = 1e-4;

  int iter = 0;
  for (; iter < max_iters; ++iter) {
    // Central finite differences in transform space.
    std::vector<double> grad(dim);
    double grad_norm2 = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      std::vector<double> plus = theta, minus = theta;
      plus[i] += kFdDelta;
      minus[i] -= kFdDelta;
      grad[i] = (loss_at(plus) - loss_at(minus)) / (2.0 * kFdDelta);
      grad_norm2 += grad[i] * grad[i];
    }
    if (grad_norm2 == 0.0) {
      result.converged = true;
      break;
    }

    // Backtracking line search along the steepest descent direction.
    bool accepted = false;
    double s = step_scale;
    for (int bt = 0; bt < 60; ++bt) {
      std::vector<double> trial = theta;
      for (std::size_t i = 0; i < dim; ++i) trial[i] -= s * grad[i];
      double trial_loss = loss_at(trial);
      if (trial_loss < loss - 1e-4 * s * grad_norm2) {
        double step_norm = s * std::sqrt(grad_norm2);
        theta = std::move(trial);
        loss = trial_loss;
        result.loss_trace.push_back(loss);
        step_scale = std::min(s * 2.0, 1e3);
        accepted = true;
        if (loss < best_loss) {
          best_loss = loss;
          best_theta = theta;
        }
        if (step_norm < step_tolerance) result.converged = true;
        break;
      }
      s *= 0.5;
      if (s < 1e-14) break;
    }
    if (!accepted) {
      // No descent step improves the loss: numerically at a minimum.
      result.converged = true;
      break;
    }
    if (result.converged) break;
  }
  result.iterations = iter;

  if (loss > best_loss) {
    theta = best_theta;
    result.warning_diverged = true;
  }
  for (std::size_t i = 0; i < dim; ++i) from_transform(free[i], theta[i], &params, &gain);
  result.params = params;
  result.gain = gain;
  return result;
}

}  // namespace lunagen
