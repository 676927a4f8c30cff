// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0

#include "lunagen/hapke.hpp"

#include <cmath>
#include <numbers>

#include "lunagen/error.hpp"

namespace lunagen {

void HapkeParams::validate() const {
  require(w > 0.0 && w <= 1.0, Errc::invalid_argument, "hapke: w must be in (0, 1]");
  require(b > -1.0 && b < 1.0, Errc::invalid_argument, "hapke: b must be in (-1, 1)");
  require(B0 >= 0.0, Errc::invalid_argument, "hapke: B0 must be >= 0");
  require(h > 0.0, Errc::invalid_argument, "hapke: h must be positive");
}

double hapke_brdf(const HapkeParams& p, double mu0, double mu, double g) {
  p.validate();
  require(mu0 > 0.0 && mu0 <= 1.0, Errc::invalid_argument, "hapke: mu0 outside (0, 1]");
  require(mu > 0.0 && mu <= 1.0, Errc::invalid_argument, "hapke: mu outside (0, 1]");
  require(g >= 0.0 && g <= std::numbers::pi, Errc::invalid_argument,
          "hapke: phase angle outside [0, pi]");

  const double gamma = std::sqrt(1.0 - p.w);
  const double H0 = (1.0 + 2.0 * mu0) / (1.0 + 2.0 * mu0 * gamma);
  const double H1 = (1.0 + 2.0 * mu) / (1.0 + 2.0 * mu * gamma);

  const double cg = std::cos(g);
  const double phase = (1.0 - p.b * p.b) / std::pow(1.0 + 2.0 * p.b * cg + p.b * p.b, 1.5);

  // tan(g/2) -> inf at g = pi gives B -> 0, which IEEE division handles.
  const double surge = p.B0 / (1.0 + std::tan(0.5 * g) / p.h);

  const double bracket = (1.0 + surge) * phase + H0 * H1 - 1.0;
  return p.w / (4.0 * std::numbers::pi) / (mu0 + mu) * bracket;
}

}  // namespace lunagen
