// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0

#include "lunagen/procedural.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "lunagen/error.hpp"
#include "lunagen/threading.hpp"

namespace lunagen {

using nlohmann::json;

Extent dem_extent(const DemGrid& dem) {
  return Extent{dem.x_min(), dem.y_min(), dem.x_max(), dem.y_max()};
}

void NoiseSpec::validate() const {
  require(amplitude >= 0.0, Errc::invalid_argument, "noise: amplitude must be >= 0");
  require(base_wavelength > 0.0, Errc::invalid_argument, "noise: wavelength must be positive");
  require(octaves >= 1, Errc::invalid_argument, "noise: octaves must be >= 1");
  require(persistence > 0.0 && persistence < 1.0, Errc::invalid_argument,
          "noise: persistence must be in (0, 1)");
  require(lacunarity > 1.0, Errc::invalid_argument, "noise: lacunarity must be > 1");
}

std::size_t sample_poisson(double lambda, RandomStream& rng) {
  require(lambda >= 0.0 && std::isfinite(lambda), Errc::invalid_argument,
          "poisson: invalid mean");
  // Knuth's product method, chunked so exp(-lambda) never underflows.
  std::size_t total = 0;
  while (lambda > 0.0) {
    double chunk = std::min(lambda, 500.0);
    double limit = std::exp(-chunk);
    std::size_t k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= rng.next_double();
    } while (p > limit);
    total += k - 1;
    lambda -= chunk;
  }
  return total;
}

double sample_power_law(double u, double r_min, double r_max, double power_exponent) {
  if (std::abs(power_exponent - 1.0) < 1e-12) return r_min * std::pow(r_max / r_min, u);
  double e = 1.0 - power_exponent;
  double lo = std::pow(r_min, e);
  double hi = std::pow(r_max, e);
  return std::pow(lo + u * (hi - lo), 1.0 / e);
}

namespace {

void check_radius_range(double r_min, double r_max, double density) {
  require(r_min > 0.0 && r_max > r_min, Errc::invalid_argument,
          "feature generator: need 0 < r_min < r_max");
  require(density >= 0.0, Errc::invalid_argument, "feature generator: negative density");
}

std::size_t feature_count(const Extent& region, double density_per_km2, std::uint64_t seed) {
  double lambda = density_per_km2 * region.area_m2() / 1e6;
  RandomStream rng(hash_string(seed, "feature_count"));
  return sample_poisson(lambda, rng);
}

Vec2d feature_center(const Extent& region, std::uint64_t seed, std::uint64_t index) {
  double ux = to_unit_double(hash_counters(seed, index, std::uint64_t{0}));
  double uy = to_unit_double(hash_counters(seed, index, std::uint64_t{1}));
  return Vec2d(region.x_min + ux * region.width(), region.y_min + uy * region.height());
}

}  // namespace

CraterField generate_craters(const Extent& region, double density_per_km2, double r_min,
                             double r_max, double power_exponent, std::uint64_t seed,
                             double depth_ratio, double rim_ratio) {
  check_radius_range(r_min, r_max, density_per_km2);
  require(depth_ratio > 0.0 && rim_ratio >= 0.0, Errc::invalid_argument,
          "generate_craters: invalid depth/rim ratios");
  CraterField field;
  std::size_t n = feature_count(region, density_per_km2, seed);
  field.craters.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Crater c;
    c.center = feature_center(region, seed, i);
    double ur = to_unit_double(hash_counters(seed, static_cast<std::uint64_t>(i), std::uint64_t{2}));
    c.radius = sample_power_law(ur, r_min, r_max, power_exponent);
    c.depth = depth_ratio * c.radius;
    c.rim_height = rim_ratio * c.radius;
    field.craters.push_back(c);
  }
  return field;
}

BoulderField generate_boulders(const Extent& region, double density_per_km2, double r_min,
                               double r_max, double power_exponent, std::uint64_t seed) {
  check_radius_range(r_min, r_max, density_per_km2);
  BoulderField field;
  std::size_t n = feature_count(region, density_per_km2, seed);
  field.boulders.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Boulder b;
    b.center = feature_center(region, seed, i);
    double ur = to_unit_double(hash_counters(seed, static_cast<std::uint64_t>(i), std::uint64_t{2}));
    b.radius = sample_power_law(ur, r_min, r_max, power_exponent);
    field.boulders.push_back(b);
  }
  return field;
}

DemGrid apply_craters(const DemGrid& dem, const CraterField& field) {
  dem.validate();
  for (const auto& c : field.craters) {
    require(c.radius > 0.0 && c.depth > 0.0 && c.rim_height >= 0.0, Errc::invalid_argument,
            "apply_craters: invalid crater attributes");
    require(dem.contains(c.center.x(), c.center.y()), Errc::out_of_range,
            "apply_craters: crater center outside DEM extent");
  }

  DemGrid out = dem;
  if (field.craters.empty()) return out;

  // Per-cell accumulation in crater index order keeps float sums identical
  // across thread counts.
  parallel_for_chunks(static_cast<std::size_t>(out.nrows), 0, [&](std::size_t r0, std::size_t r1) {
    for (std::size_t r = r0; r < r1; ++r) {
      double y = out.origin_y + static_cast<double>(r) * out.cell_size;
      for (const auto& c : field.craters) {
        double reach = 3.0 * c.radius;
        double dy = y - c.center.y();
        if (std::abs(dy) > reach) continue;
        int c_lo = std::max(0, static_cast<int>(std::ceil((c.center.x() - reach - out.origin_x) /
                                                          out.cell_size)));
        int c_hi = std::min(out.ncols - 1, static_cast<int>(std::floor(
                                               (c.center.x() + reach - out.origin_x) /
                                               out.cell_size)));
        for (int col = c_lo; col <= c_hi; ++col) {
          double x = out.origin_x + col * out.cell_size;
          double rho = std::hypot(x - c.center.x(), dy);
          if (rho > reach) continue;
          double delta;
          if (rho <= c.radius) {
            double q = rho / c.radius;
            delta = -c.depth + (c.depth + c.rim_height) * q * q;
          } else {
            double q = c.radius / rho;
            delta = c.rim_height * q * q * q;
          }
          out.heights[r * out.ncols + col] += delta;
        }
      }
    }
  });
  return out;
}

namespace {

inline double fade(double t) { return t * t * t * (t * (6.0 * t - 15.0) + 10.0); }

inline double lattice_grad(std::uint64_t seed, std::int64_t i, std::int64_t j, double dx,
                           double dy) {
  double angle = 2.0 * std::numbers::pi *
                 to_unit_double(hash_counters(seed, static_cast<std::uint64_t>(i),
                                              static_cast<std::uint64_t>(j)));
  return std::cos(angle) * dx + std::sin(angle) * dy;
}

}  // namespace

double perlin2(std::uint64_t seed, double u, double v) {
  double fu = std::floor(u);
  double fv = std::floor(v);
  auto i = static_cast<std::int64_t>(fu);
  auto j = static_cast<std::int64_t>(fv);
  double du = u - fu;
  double dv = v - fv;

  double n00 = lattice_grad(seed, i, j, du, dv);
  double n10 = lattice_grad(seed, i + 1, j, du - 1.0, dv);
  double n01 = lattice_grad(seed, i, j + 1, du, dv - 1.0);
  double n11 = lattice_grad(seed, i + 1, j + 1, du - 1.0, dv - 1.0);

  double sx = fade(du);
  double sy = fade(dv);
  double nx0 = n00 + sx * (n10 - n00);
  double nx1 = n01 + sx * (n11 - n01);
  double value = nx0 + sy * (nx1 - nx0);
  // 2D gradient noise with unit gradients spans [-sqrt(2)/2, sqrt(2)/2].
  return value * std::numbers::sqrt2;
}

DemGrid add_perlin(const DemGrid& dem, const NoiseSpec& spec) {
  dem.validate();
  spec.validate();
  DemGrid out = dem;
  if (spec.amplitude == 0.0) return out;

  double weight_sum = 0.0;
  for (int k = 0; k < spec.octaves; ++k) weight_sum += std::pow(spec.persistence, k);
  double scale = spec.amplitude / weight_sum;

  parallel_for_chunks(static_cast<std::size_t>(out.nrows), 0, [&](std::size_t r0, std::size_t r1) {
    for (std::size_t r = r0; r < r1; ++r) {
      double y = out.origin_y + static_cast<double>(r) * out.cell_size;
      for (int c = 0; c < out.ncols; ++c) {
        double x = out.origin_x + c * out.cell_size;
        double total = 0.0;
        double freq = 1.0 / spec.base_wavelength;
        double amp = 1.0;
        for (int k = 0; k < spec.octaves; ++k) {
          total += amp * perlin2(hash_counters(spec.seed, static_cast<std::uint64_t>(k)),
                                 x * freq, y * freq);
          freq *= spec.lacunarity;
          amp *= spec.persistence;
        }
        out.heights[r * out.ncols + c] += scale * total;
      }
    }
  });
  return out;
}

std::string to_json_string(const CraterField& field) {
  json arr = json::array();
  for (const auto& c : field.craters)
    arr.push_back({c.center.x(), c.center.y(), c.radius, c.depth, c.rim_height});
  return json{{"craters", arr}}.dump();
}

std::string to_json_string(const BoulderField& field) {
  json arr = json::array();
  for (const auto& b : field.boulders) arr.push_back({b.center.x(), b.center.y(), b.radius});
  return json{{"boulders", arr}}.dump();
}

std::string to_json_string(const NoiseSpec& spec) {
  return json{{"amplitude_m", spec.amplitude},   {"base_wavelength_m", spec.base_wavelength},
              {"octaves", spec.octaves},         {"persistence", spec.persistence},
              {"lacunarity", spec.lacunarity},   {"seed", spec.seed}}
      .dump();
}

namespace {
json parse_or_fail(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(Errc::bad_format, std::string("malformed ") + what + " JSON: " + e.what());
  }
}
}  // namespace

CraterField crater_field_from_json(const std::string& text) {
  json j = parse_or_fail(text, "crater field");
  CraterField field;
  for (const auto& e : j.at("craters")) {
    require(e.is_array() && e.size() == 5, Errc::bad_format, "crater entry must have 5 values");
    Crater c;
    c.center = Vec2d(e[0].get<double>(), e[1].get<double>());
    c.radius = e[2].get<double>();
    c.depth = e[3].get<double>();
    c.rim_height = e[4].get<double>();
    field.craters.push_back(c);
  }
  return field;
}

BoulderField boulder_field_from_json(const std::string& text) {
  json j = parse_or_fail(text, "boulder field");
  BoulderField field;
  for (const auto& e : j.at("boulders")) {
    require(e.is_array() && e.size() == 3, Errc::bad_format, "boulder entry must have 3 values");
    Boulder b;
    b.center = Vec2d(e[0].get<double>(), e[1].get<double>());
    b.radius = e[2].get<double>();
    field.boulders.push_back(b);
  }
  return field;
}

NoiseSpec noise_spec_from_json(const std::string& text) {
  json j = parse_or_fail(text, "noise spec");
  NoiseSpec spec;
  spec.amplitude = j.at("amplitude_m").get<double>();
  spec.base_wavelength = j.at("base_wavelength_m").get<double>();
  spec.octaves = j.value("octaves", 1);
  spec.persistence = j.value("persistence", 0.5);
  spec.lacunarity = j.value("lacunarity", 2.0);
  spec.seed = j.value("seed", std::uint64_t{0});
  spec.validate();
  return spec;
}

}  // namespace lunagen
