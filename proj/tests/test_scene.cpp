// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0

#include "lunagen/scene.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lunagen/hapke.hpp"
#include "lunagen/hash.hpp"
#include "support/oracles.hpp"

using namespace lunagen;

namespace {

DemGrid flat_grid(int n, double cell, double value = 0.0) {
  DemGrid dem;
  dem.ncols = dem.nrows = n;
  dem.cell_size = cell;
  dem.heights.assign(static_cast<std::size_t>(n) * n, value);
  return dem;
}

DemGrid ramp_grid(int n, double cell) {  // h = x
  DemGrid dem = flat_grid(n, cell);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) dem.at(c, r) = c * cell;
  return dem;
}

Scene flat_scene(int n = 33, double cell = 1.0, double value = 0.0) {
  return Scene::build(flat_grid(n, cell, value), BoulderField{}, HapkeParams{},
                      Vec3d(0, 0, 1), 1361.0);
}

}  // namespace

TEST_CASE("trace_ray: vertical hit on flat terrain") {
  Scene scene = flat_scene();
  auto hit = scene.trace_ray(Ray{Vec3d(16, 16, 100), Vec3d(0, 0, -1)});
  REQUIRE(hit.has_value());
  CHECK(hit->t == doctest::Approx(100.0).epsilon(1e-12));
  CHECK((hit->normal - Vec3d(0, 0, 1)).norm() < 1e-12);
  CHECK(hit->object == kTerrainObject);
}

TEST_CASE("trace_ray: escaping ray misses") {
  Scene scene = flat_scene();
  CHECK_FALSE(scene.trace_ray(Ray{Vec3d(16, 16, 10), Vec3d(0, 0, 1)}).has_value());
  CHECK_FALSE(scene.trace_ray(Ray{Vec3d(16, 16, 10), Vec3d(1, 0, 0.05).normalized()}).has_value());
}

TEST_CASE("trace_ray: analytic ramp h = x") {
  Scene scene = Scene::build(ramp_grid(33, 1.0), BoulderField{}, HapkeParams{}, Vec3d(0, 0, 1),
                             1361.0);
  // From (0, 16, 10) straight down: h(0, y) = 0, so t = 10 and the hit is the
  // plane point (0, 16, 0).
  auto hit = scene.trace_ray(Ray{Vec3d(0, 16, 10), Vec3d(0, 0, -1)});
  REQUIRE(hit.has_value());
  CHECK(hit->t == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(hit->point.z() == doctest::Approx(0.0).epsilon(1e-9));
  CHECK((hit->normal - Vec3d(-1, 0, 1).normalized()).norm() < 1e-9);

  // Oblique ray: solve o_z + t d_z = x(t) by hand for a 45 degree ramp.
  Vec3d d = Vec3d(1, 0, -1).normalized();
  auto oblique = scene.trace_ray(Ray{Vec3d(2, 16, 12), d});
  REQUIRE(oblique.has_value());
  // x(t) = 2 + t/sqrt(2); z(t) = 12 - t/sqrt(2); equal at t = 5 sqrt(2).
  CHECK(oblique->t == doctest::Approx(5.0 * std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("trace_ray: boulder hemisphere and its shadowing role") {
  BoulderField boulders;
  boulders.boulders.push_back(Boulder{Vec2d(16.0, 16.0), 2.0});
  Scene scene = Scene::build(flat_grid(33, 1.0), boulders, HapkeParams{}, Vec3d(0, 0, 1), 1361.0);

  auto top = scene.trace_ray(Ray{Vec3d(16, 16, 50), Vec3d(0, 0, -1)});
  REQUIRE(top.has_value());
  CHECK(top->object == 0);
  CHECK(top->t == doctest::Approx(48.0).epsilon(1e-12));  // apex at z = 2
  CHECK((top->normal - Vec3d(0, 0, 1)).norm() < 1e-12);

  // A ray past the boulder reaches the terrain.
  auto ground = scene.trace_ray(Ray{Vec3d(22, 16, 50), Vec3d(0, 0, -1)});
  REQUIRE(ground.has_value());
  CHECK(ground->object == kTerrainObject);

  // Horizontal ray at half height intersects the sphere surface.
  auto side = scene.trace_ray(Ray{Vec3d(0, 16, 1.0), Vec3d(1, 0, 0)});
  REQUIRE(side.has_value());
  CHECK(side->object == 0);
  double expected_t = 16.0 - std::sqrt(4.0 - 1.0);  // x = cx - sqrt(r^2 - z^2)
  CHECK(side->t == doctest::Approx(expected_t).epsilon(1e-12));
}

TEST_CASE("trace_ray: max-mipmap agrees with the brute-force marcher") {
  // Rough terrain + boulders, 2000 random rays (the acceptance suite runs the
  // full 10k-ray version over a fused + augmented DEM). The terrain must be
  // smooth at cell scale or the fixed-step oracle steps over thin spikes.
  NoiseSpec roughness;
  roughness.amplitude = 6.0;
  roughness.base_wavelength = 24.0;
  roughness.octaves = 3;
  roughness.seed = 5150;
  DemGrid dem = add_perlin(flat_grid(65, 1.0), roughness);
  BoulderField boulders;
  for (int k = 0; k < 12; ++k)
    boulders.boulders.push_back(Boulder{
        Vec2d(8.0 + 48.0 * uniform_double(88, 2 * k), 8.0 + 48.0 * uniform_double(88, 2 * k + 1)),
        0.5 + 1.5 * uniform_double(89, k)});
  Scene scene = Scene::build(dem, boulders, HapkeParams{}, Vec3d(0, 0, 1), 1361.0);

  int hits = 0;
  for (std::uint64_t k = 0; k < 2000; ++k) {
    Vec3d origin(2.0 + 60.0 * uniform_double(1000, 3 * k),
                 2.0 + 60.0 * uniform_double(1000, 3 * k + 1),
                 8.0 + 14.0 * uniform_double(1000, 3 * k + 2));
    double az = 2.0 * std::numbers::pi * uniform_double(2000, k);
    double dz = -0.25 - 0.7 * uniform_double(3000, k);
    double dxy = std::sqrt(1.0 - dz * dz);
    Ray ray{origin, Vec3d(dxy * std::cos(az), dxy * std::sin(az), dz)};

    auto fast = scene.trace_ray(ray);
    auto brute = testing::brute_force_trace(scene, ray);
    REQUIRE(fast.has_value() == brute.hit);
    if (fast) {
      CHECK(std::abs(fast->t - brute.t) <= dem.cell_size / 4.0);
      ++hits;
    }
  }
  CHECK(hits > 800);  // the geometry must actually exercise the tracer
}

TEST_CASE("shade: terminator, shadowing, and the zenith composition") {
  SUBCASE("normal facing away from the sun gives zero") {
    Scene scene = flat_scene();
    Hit hit;
    hit.t = 1.0;
    hit.point = Vec3d(16, 16, 0);
    hit.normal = Vec3d(0, 0, -1);  // artificial: anti-sun normal
    CHECK(shade(scene, hit, Ray{Vec3d(16, 16, 10), Vec3d(0, 0, -1)}, false) == 0.0);
  }

  SUBCASE("boulder occludes the sun") {
    BoulderField boulders;
    boulders.boulders.push_back(Boulder{Vec2d(20.0, 16.0), 2.0});
    Vec3d sun = Vec3d(1, 0, 0.25).normalized();  // low sun along +x
    Scene scene = Scene::build(flat_grid(33, 1.0), boulders, HapkeParams{}, sun, 1361.0);
    Ray view{Vec3d(16, 16, 30), Vec3d(0, 0, -1)};
    auto hit = scene.trace_ray(view);
    REQUIRE(hit.has_value());
    REQUIRE(hit->object == kTerrainObject);
    CHECK(shade(scene, *hit, view, true) == 0.0);
    CHECK(shade(scene, *hit, view, false) > 0.0);
  }

  SUBCASE("flat terrain, zenith sun, nadir view equals E * brdf(1, 1, 0)") {
    HapkeParams p{0.11, -0.4, 1.0, 0.06};
    Scene scene = Scene::build(flat_grid(33, 1.0), BoulderField{}, p, Vec3d(0, 0, 1), 1361.0);
    Ray view{Vec3d(16, 16, 25), Vec3d(0, 0, -1)};
    auto hit = scene.trace_ray(view);
    REQUIRE(hit.has_value());
    double expected = 1361.0 * hapke_brdf(p, 1.0, 1.0, 0.0);
    CHECK(shade(scene, *hit, view, true) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("scene build rejects invalid inputs") {
  CHECK_THROWS_AS(Scene::build(flat_grid(33, 1.0), BoulderField{}, HapkeParams{},
                               Vec3d(0, 0, 0), 1361.0),
                  Error);
  BoulderField outside;
  outside.boulders.push_back(Boulder{Vec2d(-10.0, 0.0), 1.0});
  CHECK_THROWS_AS(
      Scene::build(flat_grid(33, 1.0), outside, HapkeParams{}, Vec3d(0, 0, 1), 1361.0), Error);
}
