// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lunagen/dem.hpp"
#include "lunagen/geom.hpp"
#include "lunagen/hash.hpp"

namespace lunagen {

struct Extent {
  double x_min = 0.0, y_min = 0.0, x_max = 0.0, y_max = 0.0;
  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area_m2() const { return width() * height(); }
  bool contains(double x, double y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }
};

Extent dem_extent(const DemGrid& dem);

struct Crater {
  Vec2d center = Vec2d::Zero();  // world meters
  double radius = 0.0;
  double depth = 0.0;
  double rim_height = 0.0;
};

struct CraterField {
  std::vector<Crater> craters;
};

/// Boulders are rendered as solid hemispheres seated on the local terrain.
struct Boulder {
  Vec2d center = Vec2d::Zero();
  double radius = 0.0;
};

struct BoulderField {
  std::vector<Boulder> boulders;
};

struct NoiseSpec {
  double amplitude = 0.0;       // meters
  double base_wavelength = 1.0; // meters
  int octaves = 1;
  double persistence = 0.5;     // in (0, 1)
  double lacunarity = 2.0;      // > 1
  std::uint64_t seed = 0;

  void validate() const;
};

/// Poisson-distributed feature count with mean density*area; radii i.i.d. from
/// a truncated power law p(r) ~ r^-power_exponent on [r_min, r_max]. Fully
/// determined by the seed; each feature's randomness comes from
/// hash(seed, feature_index), so evaluation order never matters.
/// depth = depth_ratio*radius, rim_height = rim_ratio*radius.
CraterField generate_craters(const Extent& region, double density_per_km2, double r_min,
                             double r_max, double power_exponent, std::uint64_t seed,
                             double depth_ratio = 0.2, double rim_ratio = 0.04);

BoulderField generate_boulders(const Extent& region, double density_per_km2, double r_min,
                               double r_max, double power_exponent, std::uint64_t seed);

/// Adds each crater's radial profile to the heights: parabolic bowl reaching
/// -depth at the center and +rim_height at the radius, rim decaying as
/// (radius/rho)^3 out to 3*radius. Additive, order-independent.
DemGrid apply_craters(const DemGrid& dem, const CraterField& field);

/// Classic gradient-lattice Perlin noise summed over octaves and scaled so the
/// total octave weight maps to `amplitude` (|delta| <= amplitude everywhere).
DemGrid add_perlin(const DemGrid& dem, const NoiseSpec& spec);

/// Single octave of 2D gradient-lattice noise, normalized to [-1, 1], exactly
/// zero on the integer lattice.
double perlin2(std::uint64_t seed, double u, double v);

/// Inverse-CDF draw from the truncated power law (exposed for tests).
double sample_power_law(double u, double r_min, double r_max, double power_exponent);

std::size_t sample_poisson(double lambda, RandomStream& rng);

// JSON forms for manifest traceability and scene files.
std::string to_json_string(const CraterField& field);
std::string to_json_string(const BoulderField& field);
std::string to_json_string(const NoiseSpec& spec);
CraterField crater_field_from_json(const std::string& text);
BoulderField boulder_field_from_json(const std::string& text);
NoiseSpec noise_spec_from_json(const std::string& text);

}  // namespace lunagen
