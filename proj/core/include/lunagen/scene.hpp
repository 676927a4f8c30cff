// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "lunagen/dem.hpp"
#include "lunagen/geom.hpp"
#include "lunagen/hapke.hpp"
#include "lunagen/procedural.hpp"

namespace lunagen {

constexpr int kTerrainObject = -1;

struct Hit {
  double t = 0.0;       // meters along the ray
  Vec3d point = Vec3d::Zero();
  Vec3d normal = Vec3d::UnitZ();
  int object = kTerrainObject;  // kTerrainObject or boulder index
};

/// Boulder with its seat height resolved against the terrain (center.z).
struct SceneBoulder {
  Vec3d center = Vec3d::Zero();
  double radius = 0.0;
};

/// Immutable render scene: terrain heightfield with a max-mipmap acceleration
/// structure, hemispherical boulders on a uniform grid index, Hapke
/// photometry, and a single parallel sun. Safe to share across workers.
class Scene {
 public:
  static Scene build(DemGrid dem, const BoulderField& boulders, const HapkeParams& hapke,
                     const Vec3d& sun_direction, double sun_irradiance,
                     std::optional<DemGrid> albedo_texture = std::nullopt);

  const DemGrid& dem() const { return dem_; }
  const std::vector<SceneBoulder>& boulders() const { return boulders_; }
  const HapkeParams& hapke() const { return hapke_; }
  const Vec3d& sun_direction() const { return sun_direction_; }
  double sun_irradiance() const { return sun_irradiance_; }
  bool has_albedo_texture() const { return albedo_.has_value(); }

  /// Multiplicative reflectance factor at a ground position (1 when no map).
  double albedo_factor(double x, double y) const;

  /// Highest surface point (terrain or boulder top).
  double max_surface_height() const { return z_max_; }

  /// Copy with replaced photometric parameters (geometry and acceleration
  /// structures are reused as-is).
  Scene with_photometry(const HapkeParams& hapke) const;

  /// Copy with the albedo texture replaced (or removed with nullopt).
  Scene with_albedo_texture(std::optional<DemGrid> albedo_texture) const;

  std::optional<Hit> trace_ray(const Ray& ray) const;
  bool occluded(const Vec3d& point, const Vec3d& direction) const;

 private:
  Scene() = default;

  struct MipLevel {
    int ncols = 0;
    int nrows = 0;
    std::vector<double> max_height;
    double value(int i, int j) const {
      return max_height[static_cast<std::size_t>(j) * ncols + i];
    }
  };

  std::optional<Hit> trace_terrain(const Ray& ray) const;
  std::optional<Hit> intersect_patch(int i, int j, const Ray& ray, double ta, double tb) const;
  std::optional<Hit> trace_boulders(const Ray& ray, double t_limit) const;
  bool intersect_boulder(int index, const Ray& ray, double t_limit, Hit* hit) const;

  DemGrid dem_;
  std::vector<SceneBoulder> boulders_;
  HapkeParams hapke_;
  Vec3d sun_direction_ = Vec3d::UnitZ();
  double sun_irradiance_ = 1361.0;
  std::optional<DemGrid> albedo_;

  std::vector<MipLevel> levels_;  // levels_[0] = per-patch maxima
  double z_max_ = 0.0;

  // Uniform grid over boulders.
  int bgrid_ncols_ = 0;
  int bgrid_nrows_ = 0;
  double bgrid_cell_ = 0.0;
  std::vector<std::vector<int>> bgrid_;
};

std::optional<Hit> trace_ray(const Scene& scene, const Ray& ray);

/// Radiance toward the viewer at a hit: direct sunlight through the Hapke
/// BRDF, optionally gated by a shadow ray toward the sun.
double shade(const Scene& scene, const Hit& hit, const Ray& ray, bool shadows);

/// Scene file loader. Schema:
/// { "dem": {"raster": p, "header": p},
///   "boulders": path-or-inline (optional),
///   "hapke": {"w","b","B0","h"},
///   "sun_direction": [x,y,z], "sun_irradiance": W/m^2,
///   "albedo_texture": {"raster": p, "header": p} (optional) }
/// Relative paths resolve against the scene file directory.
Scene load_scene(const std::filesystem::path& path);

}  // namespace lunagen
