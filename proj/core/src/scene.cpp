// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0

#include "lunagen/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lunagen/error.hpp"

namespace lunagen {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Parametric overlap of the ray with an axis-aligned 2D slab pair.
// Returns false when the ray misses the rectangle entirely.
bool clip_axis(double o, double d, double lo, double hi, double& t0, double& t1) {
  if (d == 0.0) return o >= lo && o <= hi;
  double ta = (lo - o) / d;
  double tb = (hi - o) / d;
  if (ta > tb) std::swap(ta, tb);
  t0 = std::max(t0, ta);
  t1 = std::min(t1, tb);
  return t0 <= t1;
}

}  // namespace

Scene Scene::build(DemGrid dem, const BoulderField& boulders, const HapkeParams& hapke,
                   const Vec3d& sun_direction, double sun_irradiance,
                   std::optional<DemGrid> albedo_texture) {
  dem.validate();
  hapke.validate();
  require(dem.ncols >= 2 && dem.nrows >= 2, Errc::invalid_argument,
          "scene: DEM must span at least 2x2 cells");
  require(sun_direction.norm() > 1e-12, Errc::invalid_argument, "scene: zero sun direction");
  require(sun_irradiance > 0.0, Errc::invalid_argument, "scene: sun irradiance must be positive");
  if (albedo_texture) albedo_texture->validate();

  Scene scene;
  scene.dem_ = std::move(dem);
  scene.hapke_ = hapke;
  scene.sun_direction_ = sun_direction.normalized();
  scene.sun_irradiance_ = sun_irradiance;
  scene.albedo_ = std::move(albedo_texture);

  const DemGrid& d = scene.dem_;

  // Max-mipmap over bilinear patches: the surface maximum inside a patch is
  // attained at one of its four corners.
  MipLevel base;
  base.ncols = d.ncols - 1;
  base.nrows = d.nrows - 1;
  base.max_height.resize(static_cast<std::size_t>(base.ncols) * base.nrows);
  for (int j = 0; j < base.nrows; ++j)
    for (int i = 0; i < base.ncols; ++i)
      base.max_height[static_cast<std::size_t>(j) * base.ncols + i] =
          std::max(std::max(d.at(i, j), d.at(i + 1, j)),
                   std::max(d.at(i, j + 1), d.at(i + 1, j + 1)));
  scene.levels_.push_back(std::move(base));
  while (scene.levels_.back().ncols > 1 || scene.levels_.back().nrows > 1) {
    const MipLevel& prev = scene.levels_.back();
    MipLevel next;
    next.ncols = (prev.ncols + 1) / 2;
    next.nrows = (prev.nrows + 1) / 2;
    next.max_height.assign(static_cast<std::size_t>(next.ncols) * next.nrows, -kInf);
    for (int j = 0; j < prev.nrows; ++j)
      for (int i = 0; i < prev.ncols; ++i) {
        double& dst = next.max_height[static_cast<std::size_t>(j / 2) * next.ncols + i / 2];
        dst = std::max(dst, prev.value(i, j));
      }
    scene.levels_.push_back(std::move(next));
  }

  double terrain_max = *std::max_element(d.heights.begin(), d.heights.end());
  scene.z_max_ = terrain_max;

  // Seat boulders on the terrain and build the uniform grid index.
  scene.boulders_.reserve(boulders.boulders.size());
  double max_radius = 0.0;
  for (const auto& b : boulders.boulders) {
    require(b.radius > 0.0, Errc::invalid_argument, "scene: boulder radius must be positive");
    require(d.contains(b.center.x(), b.center.y()), Errc::out_of_range,
            "scene: boulder center outside DEM extent");
    double seat = sample_height_clamped(d, b.center.x(), b.center.y());
    scene.boulders_.push_back(SceneBoulder{Vec3d(b.center.x(), b.center.y(), seat), b.radius});
    scene.z_max_ = std::max(scene.z_max_, seat + b.radius);
    max_radius = std::max(max_radius, b.radius);
  }
  if (!scene.boulders_.empty()) {
    scene.bgrid_cell_ = std::max(8.0 * d.cell_size, 2.0 * max_radius);
    scene.bgrid_ncols_ =
        std::max(1, static_cast<int>(std::ceil((d.x_max() - d.x_min()) / scene.bgrid_cell_)));
    scene.bgrid_nrows_ =
        std::max(1, static_cast<int>(std::ceil((d.y_max() - d.y_min()) / scene.bgrid_cell_)));
    scene.bgrid_.assign(static_cast<std::size_t>(scene.bgrid_ncols_) * scene.bgrid_nrows_, {});
    for (int idx = 0; idx < static_cast<int>(scene.boulders_.size()); ++idx) {
      const auto& b = scene.boulders_[static_cast<std::size_t>(idx)];
      int i0 = std::clamp(static_cast<int>((b.center.x() - b.radius - d.x_min()) / scene.bgrid_cell_),
                          0, scene.bgrid_ncols_ - 1);
      int i1 = std::clamp(static_cast<int>((b.center.x() + b.radius - d.x_min()) / scene.bgrid_cell_),
                          0, scene.bgrid_ncols_ - 1);
      int j0 = std::clamp(static_cast<int>((b.center.y() - b.radius - d.y_min()) / scene.bgrid_cell_),
                          0, scene.bgrid_nrows_ - 1);
      int j1 = std::clamp(static_cast<int>((b.center.y() + b.radius - d.y_min()) / scene.bgrid_cell_),
                          0, scene.bgrid_nrows_ - 1);
      for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i)
          scene.bgrid_[static_cast<std::size_t>(j) * scene.bgrid_ncols_ + i].push_back(idx);
    }
  }
  return scene;
}

Scene Scene::with_photometry(const HapkeParams& hapke) const {
  hapke.validate();
  Scene copy = *this;
  copy.hapke_ = hapke;
  return copy;
}

Scene Scene::with_albedo_texture(std::optional<DemGrid> albedo_texture) const {
  if (albedo_texture) albedo_texture->validate();
  Scene copy = *this;
  copy.albedo_ = std::move(albedo_texture);
  return copy;
}

double Scene::albedo_factor(double x, double y) const {
  if (!albedo_) return 1.0;
  return sample_height_clamped(*albedo_, x, y);
}

std::optional<Hit> Scene::intersect_patch(int i, int j, const Ray& ray, double ta,
                                          double tb) const {
  const DemGrid& d = dem_;
  const double cs = d.cell_size;
  const double px = d.origin_x + i * cs;
  const double py = d.origin_y + j * cs;
  const double z00 = d.at(i, j), z10 = d.at(i + 1, j);
  const double z01 = d.at(i, j + 1), z11 = d.at(i + 1, j + 1);
  const double beta = z10 - z00;
  const double gamma = z01 - z00;
  const double delta = z00 - z10 - z01 + z11;

  const double xa = (ray.origin.x() - px) / cs, xb = ray.direction.x() / cs;
  const double ya = (ray.origin.y() - py) / cs, yb = ray.direction.y() / cs;

  // f(t) = ray_z(t) - surface_z(t): quadratic via the bilinear xy term.
  const double c0 = ray.origin.z() - z00 - beta * xa - gamma * ya - delta * xa * ya;
  const double c1 = ray.direction.z() - beta * xb - gamma * yb - delta * (xa * yb + xb * ya);
  const double c2 = -delta * xb * yb;

  const double span_eps = 1e-12 * (std::abs(ta) + std::abs(tb) + 1.0);

  auto make_hit = [&](double t) {
    Hit hit;
    hit.t = t;
    hit.point = ray.origin + t * ray.direction;
    double u = std::clamp((hit.point.x() - px) / cs, 0.0, 1.0);
    double v = std::clamp((hit.point.y() - py) / cs, 0.0, 1.0);
    hit.normal = Vec3d(-(beta + delta * v) / cs, -(gamma + delta * u) / cs, 1.0).normalized();
    hit.object = kTerrainObject;
    return hit;
  };

  // Ray already below the surface at the interval start.
  if (c0 + c1 * ta + c2 * ta * ta <= 0.0) return make_hit(ta);

  double roots[2];
  int n_roots = 0;
  if (std::abs(c2) < 1e-300) {
    if (c1 != 0.0) roots[n_roots++] = -c0 / c1;
  } else {
    double disc = c1 * c1 - 4.0 * c2 * c0;
    if (disc < 0.0) return std::nullopt;
    double q = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
    roots[n_roots++] = q / c2;
    if (q != 0.0) roots[n_roots++] = c0 / q;
  }
  double best = kInf;
  for (int k = 0; k < n_roots; ++k)
    if (roots[k] >= ta - span_eps && roots[k] <= tb + span_eps) best = std::min(best, roots[k]);
  if (!std::isfinite(best)) return std::nullopt;
  return make_hit(std::max(best, ta));
}

std::optional<Hit> Scene::trace_terrain(const Ray& ray) const {
  const DemGrid& d = dem_;
  double t0 = 0.0, t1 = kInf;
  if (!clip_axis(ray.origin.x(), ray.direction.x(), d.x_min(), d.x_max(), t0, t1))
    return std::nullopt;
  if (!clip_axis(ray.origin.y(), ray.direction.y(), d.y_min(), d.y_max(), t0, t1))
    return std::nullopt;
  if (t1 < t0 || t1 < 0.0) return std::nullopt;
  t0 = std::max(t0, 0.0);

  const double dz = ray.direction.z();
  const double terrain_max = levels_.back().value(0, 0);
  double z_entry = ray.origin.z() + dz * t0;
  if (z_entry > terrain_max) {
    if (dz >= 0.0) return std::nullopt;
    // Fast-forward to where the ray first reaches the global maximum height.
    t0 = std::max(t0, (terrain_max - ray.origin.z()) / dz);
    if (t0 > t1) return std::nullopt;
  }

  const double cs = d.cell_size;
  const int top = static_cast<int>(levels_.size()) - 1;
  const double eps_t =
      1e-9 * cs / std::max({std::abs(ray.direction.x()), std::abs(ray.direction.y()), 1e-9});

  int level = top;
  double t = t0;
  long guard = 16L * (levels_[0].ncols + levels_[0].nrows + 4) * (top + 2);

  while (t <= t1 && guard-- > 0) {
    const double probe_t = std::min(t + eps_t, t1);
    const double px = ray.origin.x() + ray.direction.x() * probe_t;
    const double py = ray.origin.y() + ray.direction.y() * probe_t;
    const MipLevel& lvl = levels_[static_cast<std::size_t>(level)];
    const double lsize = cs * static_cast<double>(1 << level);
    int i = std::clamp(static_cast<int>(std::floor((px - d.x_min()) / lsize)), 0, lvl.ncols - 1);
    int j = std::clamp(static_cast<int>(std::floor((py - d.y_min()) / lsize)), 0, lvl.nrows - 1);

    // Exit parameter of this level cell.
    double tc = t1;
    if (ray.direction.x() > 0.0)
      tc = std::min(tc, (d.x_min() + (i + 1) * lsize - ray.origin.x()) / ray.direction.x());
    else if (ray.direction.x() < 0.0)
      tc = std::min(tc, (d.x_min() + i * lsize - ray.origin.x()) / ray.direction.x());
    if (ray.direction.y() > 0.0)
      tc = std::min(tc, (d.y_min() + (j + 1) * lsize - ray.origin.y()) / ray.direction.y());
    else if (ray.direction.y() < 0.0)
      tc = std::min(tc, (d.y_min() + j * lsize - ray.origin.y()) / ray.direction.y());
    if (tc <= t) tc = std::min(t + eps_t, t1);

    const double z_a = ray.origin.z() + dz * t;
    const double z_b = ray.origin.z() + dz * tc;
    if (std::min(z_a, z_b) <= lvl.value(i, j)) {
      if (level == 0) {
        if (auto hit = intersect_patch(i, j, ray, t, tc)) return hit;
        if (tc >= t1) break;
        t = tc;
        level = std::min(level + 1, top);
      } else {
        --level;
      }
    } else {
      if (tc >= t1) break;
      t = tc;
      level = std::min(level + 1, top);
    }
  }
  return std::nullopt;
}

bool Scene::intersect_boulder(int index, const Ray& ray, double t_limit, Hit* hit) const {
  const SceneBoulder& b = boulders_[static_cast<std::size_t>(index)];
  const Vec3d oc = ray.origin - b.center;
  const double half_b = oc.dot(ray.direction);
  const double c = oc.squaredNorm() - b.radius * b.radius;
  const double disc = half_b * half_b - c;
  double best = t_limit;
  bool found = false;

  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    for (double t : {-half_b - s, -half_b + s}) {
      if (t <= 1e-12 || t >= best) continue;
      Vec3d p = ray.origin + t * ray.direction;
      if (p.z() + 1e-12 < b.center.z()) continue;  // below the equator plane
      best = t;
      hit->t = t;
      hit->point = p;
      hit->normal = (p - b.center).normalized();
      hit->object = index;
      found = true;
    }
  }
  // Flat underside of the hemisphere (exposed where the terrain dips).
  if (ray.direction.z() != 0.0) {
    double t = (b.center.z() - ray.origin.z()) / ray.direction.z();
    if (t > 1e-12 && t < best) {
      Vec3d p = ray.origin + t * ray.direction;
      double rho2 = (p.x() - b.center.x()) * (p.x() - b.center.x()) +
                    (p.y() - b.center.y()) * (p.y() - b.center.y());
      if (rho2 <= b.radius * b.radius) {
        hit->t = t;
        hit->point = p;
        hit->normal = Vec3d(0.0, 0.0, -1.0);
        hit->object = index;
        found = true;
      }
    }
  }
  return found;
}

std::optional<Hit> Scene::trace_boulders(const Ray& ray, double t_limit) const {
  if (boulders_.empty()) return std::nullopt;
  const DemGrid& d = dem_;

  double t0 = 0.0, t1 = t_limit;
  // Pad the clip window by the grid cell so discs straddling the extent edge
  // are still visited.
  if (!clip_axis(ray.origin.x(), ray.direction.x(), d.x_min() - bgrid_cell_,
                 d.x_max() + bgrid_cell_, t0, t1))
    return std::nullopt;
  if (!clip_axis(ray.origin.y(), ray.direction.y(), d.y_min() - bgrid_cell_,
                 d.y_max() + bgrid_cell_, t0, t1))
    return std::nullopt;
  if (t1 < t0 || t1 < 0.0) return std::nullopt;
  t0 = std::max(t0, 0.0);

  Hit best;
  best.t = t_limit;
  bool found = false;
  const double eps_t = 1e-9 * bgrid_cell_ /
                       std::max({std::abs(ray.direction.x()), std::abs(ray.direction.y()), 1e-9});

  double t = t0;
  long guard = 4L * (bgrid_ncols_ + bgrid_nrows_ + 4);
  while (t <= t1 && guard-- > 0) {
    if (found && t > best.t) break;
    const double probe_t = std::min(t + eps_t, t1);
    int i = std::clamp(
        static_cast<int>(std::floor((ray.origin.x() + ray.direction.x() * probe_t - d.x_min()) /
                                    bgrid_cell_)),
        0, bgrid_ncols_ - 1);
    int j = std::clamp(
        static_cast<int>(std::floor((ray.origin.y() + ray.direction.y() * probe_t - d.y_min()) /
                                    bgrid_cell_)),
        0, bgrid_nrows_ - 1);
    for (int idx : bgrid_[static_cast<std::size_t>(j) * bgrid_ncols_ + i]) {
      Hit hit;
      if (intersect_boulder(idx, ray, best.t, &hit)) {
        best = hit;
        found = true;
      }
    }
    double tc = t1;
    if (ray.direction.x() > 0.0)
      tc = std::min(tc, (d.x_min() + (i + 1) * bgrid_cell_ - ray.origin.x()) / ray.direction.x());
    else if (ray.direction.x() < 0.0)
      tc = std::min(tc, (d.x_min() + i * bgrid_cell_ - ray.origin.x()) / ray.direction.x());
    if (ray.direction.y() > 0.0)
      tc = std::min(tc, (d.y_min() + (j + 1) * bgrid_cell_ - ray.origin.y()) / ray.direction.y());
    else if (ray.direction.y() < 0.0)
      tc = std::min(tc, (d.y_min() + j * bgrid_cell_ - ray.origin.y()) / ray.direction.y());
    if (tc >= t1) break;
    t = std::max(tc, t + eps_t);
  }
  return found ? std::optional<Hit>(best) : std::nullopt;
}

std::optional<Hit> Scene::trace_ray(const Ray& ray) const {
  std::optional<Hit> terrain = trace_terrain(ray);
  double limit = terrain ? terrain->t : kInf;
  std::optional<Hit> boulder = trace_boulders(ray, limit);
  if (boulder) return boulder;
  return terrain;
}

bool Scene::occluded(const Vec3d& point, const Vec3d& direction) const {
  return trace_ray(Ray{point, direction.normalized()}).has_value();
}

std::optional<Hit> trace_ray(const Scene& scene, const Ray& ray) { return scene.trace_ray(ray); }

double shade(const Scene& scene, const Hit& hit, const Ray& ray, bool shadows) {
  double mu0 = hit.normal.dot(scene.sun_direction());
  if (mu0 <= 0.0) return 0.0;
  mu0 = std::min(mu0, 1.0);
  double mu = std::clamp(hit.normal.dot(-ray.direction), 1e-6, 1.0);

  if (shadows) {
    const Vec3d origin = hit.point + 1e-3 * scene.dem().cell_size * hit.normal;
    if (scene.occluded(origin, scene.sun_direction())) return 0.0;
  }

  const double cos_g = std::clamp(scene.sun_direction().dot(-ray.direction), -1.0, 1.0);
  const double g = std::acos(cos_g);
  const double albedo =
      hit.object == kTerrainObject ? scene.albedo_factor(hit.point.x(), hit.point.y()) : 1.0;
  // Radiance = irradiance * cos(incidence) * BRDF, scaled by the local albedo
  // factor.
  return scene.sun_irradiance() * mu0 * hapke_brdf(scene.hapke(), mu0, mu, g) * albedo;
}

Scene load_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open scene file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(Errc::bad_format, "malformed scene file " + path.string() + ": " + e.what());
  }
  const auto base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };

  try {
    const auto& jdem = j.at("dem");
    DemGrid dem = load_dem(resolve(jdem.at("raster").get<std::string>()),
                           resolve(jdem.at("header").get<std::string>()));

    BoulderField boulders;
    if (j.contains("boulders") && !j["boulders"].is_null()) {
      if (j["boulders"].is_string()) {
        std::ifstream bin(resolve(j["boulders"].get<std::string>()));
        if (!bin) fail(Errc::io_error, "cannot open boulder file");
        std::stringstream ss;
        ss << bin.rdbuf();
        boulders = boulder_field_from_json(ss.str());
      } else {
        boulders = boulder_field_from_json(j["boulders"].dump());
      }
    }

    HapkeParams hapke;
    if (j.contains("hapke")) {
      const auto& jh = j["hapke"];
      hapke.w = jh.value("w", hapke.w);
      hapke.b = jh.value("b", hapke.b);
      hapke.B0 = jh.value("B0", hapke.B0);
      hapke.h = jh.value("h", hapke.h);
    }

    const auto& jsun = j.at("sun_direction");
    require(jsun.is_array() && jsun.size() == 3, Errc::bad_format,
            "scene: sun_direction must be a 3-vector");
    Vec3d sun(jsun[0].get<double>(), jsun[1].get<double>(), jsun[2].get<double>());
    double irradiance = j.value("sun_irradiance", 1361.0);

    std::optional<DemGrid> albedo;
    if (j.contains("albedo_texture") && !j["albedo_texture"].is_null()) {
      const auto& ja = j["albedo_texture"];
      albedo = load_dem(resolve(ja.at("raster").get<std::string>()),
                        resolve(ja.at("header").get<std::string>()));
    }
    return Scene::build(std::move(dem), boulders, hapke, sun, irradiance, std::move(albedo));
  } catch (const json::exception& e) {
    fail(Errc::bad_format, "scene file " + path.string() + ": " + e.what());
  }
}

}  // namespace lunagen
