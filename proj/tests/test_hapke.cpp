// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0

#include "lunagen/hapke.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lunagen/error.hpp"

using namespace lunagen;

TEST_CASE("hapke: closed-form oracle at w=1, b=0, B0=0, normal geometry") {
  // H(1) = (1 + 2) / (1 + 0) = 3; bracket = 1 + 3*3 - 1 = 9; r = 9 / (8 pi).
  HapkeParams p{1.0, 0.0, 0.0, 0.06};
  double r = hapke_brdf(p, 1.0, 1.0, 0.0);
  CHECK(std::abs(r - 9.0 / (8.0 * std::numbers::pi)) < 1e-12);
  CHECK(r == doctest::Approx(0.35810).epsilon(1e-4));
}

TEST_CASE("hapke: vanishing albedo limit") {
  HapkeParams p{1e-9, -0.3, 1.0, 0.06};
  CHECK(hapke_brdf(p, 0.8, 0.5, 0.3) < 1e-9);
}

TEST_CASE("hapke: symmetric under mu0 <-> mu exchange") {
  HapkeParams p{0.11, -0.4, 1.0, 0.06};
  for (double mu0 : {0.05, 0.3, 0.77, 1.0})
    for (double mu : {0.1, 0.5, 0.92})
      for (double g : {0.0, 0.4, 1.2, 3.0})
        CHECK(hapke_brdf(p, mu0, mu, g) == doctest::Approx(hapke_brdf(p, mu, mu0, g)).epsilon(1e-14));
}

TEST_CASE("hapke: non-negative and monotone in w on a parameter grid") {
  for (int iw = 1; iw <= 8; ++iw) {
    for (double b : {-0.6, -0.2, 0.0, 0.4}) {
      for (double B0 : {0.0, 1.0, 2.5}) {
        for (double g : {0.0, 0.7, 1.9, 3.1}) {
          HapkeParams lo{iw / 10.0, b, B0, 0.06};
          HapkeParams hi{iw / 10.0 + 0.1, b, B0, 0.06};
          double r_lo = hapke_brdf(lo, 0.6, 0.4, g);
          double r_hi = hapke_brdf(hi, 0.6, 0.4, g);
          CHECK(r_lo >= 0.0);
          CHECK(r_hi >= r_lo);
        }
      }
    }
  }
}

TEST_CASE("hapke: opposition surge raises zero phase only") {
  HapkeParams base{0.3, -0.3, 0.0, 0.06};
  HapkeParams surged{0.3, -0.3, 1.0, 0.06};
  CHECK(hapke_brdf(surged, 0.9, 0.9, 0.0) > hapke_brdf(base, 0.9, 0.9, 0.0));
  // Far from opposition the surge term has died off.
  CHECK(hapke_brdf(surged, 0.9, 0.9, 2.5) ==
        doctest::Approx(hapke_brdf(base, 0.9, 0.9, 2.5)).epsilon(1e-2));
}

TEST_CASE("hapke: domain violations throw") {
  HapkeParams p;
  CHECK_THROWS_AS(hapke_brdf(p, 0.0, 1.0, 0.0), Error);   // mu0 = 0
  CHECK_THROWS_AS(hapke_brdf(p, 1.0, 1.1, 0.0), Error);   // mu > 1
  CHECK_THROWS_AS(hapke_brdf(p, 1.0, 1.0, -0.1), Error);  // g < 0
  HapkeParams bad = p;
  bad.w = 0.0;  // degenerate black surface is rejected, not silently zero
  CHECK_THROWS_AS(hapke_brdf(bad, 1.0, 1.0, 0.0), Error);
  bad = p;
  bad.b = 1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}
