// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace lunagen {

/// Hapke reflectance parameters (isotropic multiple scattering form with the
/// rational H-function approximation and a single-lobe Henyey-Greenstein
/// phase function). No macroscopic roughness or porosity terms.
struct HapkeParams {
  double w = 0.11;  // single-scattering albedo, (0, 1]
  double b = -0.4;  // HG asymmetry, (-1, 1); negative = backscattering
  double B0 = 1.0;  // opposition surge amplitude, >= 0
  double h = 0.06;  // opposition surge angular width, > 0

  void validate() const;
};

/// Bidirectional reflectance distribution function in sr^-1:
///   f = (w / 4pi) * 1 / (mu0 + mu) * [ (1 + B(g)) P(g) + H(mu0) H(mu) - 1 ]
/// with H(x) = (1 + 2x) / (1 + 2x sqrt(1 - w)),
///      P(g) = (1 - b^2) / (1 + 2b cos g + b^2)^(3/2),
///      B(g) = B0 / (1 + tan(g/2) / h).
/// Reciprocal (symmetric under mu0 <-> mu); reflected radiance is
/// irradiance * mu0 * f. mu0, mu in (0, 1]; g in [0, pi] radians. Throws on
/// domain violations.
double hapke_brdf(const HapkeParams& p, double mu0, double mu, double g);

}  // namespace lunagen
