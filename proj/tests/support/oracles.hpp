// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0
//
// Test-only oracles, independent of the implementation paths they check.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "lunagen/scene.hpp"

namespace lunagen::testing {

/// Independent bilinear lookup on the DEM (clamped to coverage).
inline double oracle_height(const DemGrid& dem, double x, double y) {
  double u = std::clamp((x - dem.origin_x) / dem.cell_size, 0.0,
                        static_cast<double>(dem.ncols - 1));
  double v = std::clamp((y - dem.origin_y) / dem.cell_size, 0.0,
                        static_cast<double>(dem.nrows - 1));
  int c = std::min(static_cast<int>(u), dem.ncols - 2);
  int r = std::min(static_cast<int>(v), dem.nrows - 2);
  double fu = u - c, fv = v - r;
  return (1 - fv) * ((1 - fu) * dem.at(c, r) + fu * dem.at(c + 1, r)) +
         fv * ((1 - fu) * dem.at(c, r + 1) + fu * dem.at(c + 1, r + 1));
}

/// Point-in-solid test for the whole scene: terrain below the bilinear
/// surface, plus solid hemispherical boulders (flat face down at the seat
/// height).
inline bool oracle_inside(const Scene& scene, const Vec3d& p) {
  const DemGrid& dem = scene.dem();
  if (p.x() >= dem.x_min() && p.x() <= dem.x_max() && p.y() >= dem.y_min() &&
      p.y() <= dem.y_max()) {
    if (p.z() <= oracle_height(dem, p.x(), p.y())) return true;
  }
  for (const auto& b : scene.boulders()) {
    double dx = p.x() - b.center.x();
    double dy = p.y() - b.center.y();
    double rho2 = dx * dx + dy * dy;
    if (rho2 > b.radius * b.radius) continue;
    if (p.z() < b.center.z()) continue;
    double dome = b.center.z() + std::sqrt(b.radius * b.radius - rho2);
    if (p.z() <= dome) return true;
  }
  return false;
}

struct OracleTrace {
  bool hit = false;
  double t = 0.0;
};

/// Brute-force fixed-step marcher (step = cell_size / 8 along the ray) with
/// bisection refinement at the first inside sample.
inline OracleTrace brute_force_trace(const Scene& scene, const Ray& ray) {
  const DemGrid& dem = scene.dem();
  // Conservative march window: the scene AABB padded by the largest boulder.
  double pad = 0.0;
  for (const auto& b : scene.boulders()) pad = std::max(pad, b.radius);
  double t0 = 0.0;
  double t1 = std::numeric_limits<double>::infinity();
  auto clip = [&](double o, double d, double lo, double hi) {
    if (d == 0.0) return o >= lo && o <= hi;
    double ta = (lo - o) / d, tb = (hi - o) / d;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    return t0 <= t1;
  };
  if (!clip(ray.origin.x(), ray.direction.x(), dem.x_min() - pad, dem.x_max() + pad))
    return {};
  if (!clip(ray.origin.y(), ray.direction.y(), dem.y_min() - pad, dem.y_max() + pad))
    return {};
  if (t1 < t0 || t1 < 0.0) return {};
  t0 = std::max(t0, 0.0);

  const double step = dem.cell_size / 8.0;
  auto at = [&](double t) { return Vec3d(ray.origin + t * ray.direction); };

  if (oracle_inside(scene, at(t0))) return {true, t0};
  double prev = t0;
  for (double t = t0 + step; t <= t1 + step; t += step) {
    double tc = std::min(t, t1);
    if (oracle_inside(scene, at(tc))) {
      double lo = prev, hi = tc;
      for (int i = 0; i < 64; ++i) {
        double mid = 0.5 * (lo + hi);
        if (oracle_inside(scene, at(mid)))
          hi = mid;
        else
          lo = mid;
      }
      return {true, hi};
    }
    prev = tc;
    if (tc >= t1) break;
  }
  return {};
}

}  // namespace lunagen::testing
