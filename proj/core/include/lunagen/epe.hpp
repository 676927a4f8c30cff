// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "lunagen/flow.hpp"

namespace lunagen {

/// End-point error statistics over the ground-truth-valid pixels. Percentiles
/// use the nearest-rank convention; the > thresholds are strict.
struct EpeReport {
  double mean_epe = 0.0;
  double p50 = 0.0;
  double p90 = 0.0;
  double p99 = 0.0;
  double frac_gt_1px = 0.0;
  double frac_gt_3px = 0.0;
  std::size_t valid_pixels = 0;
};

/// Per-pixel EPE = |pred - gt| over pixels valid in gt; prediction validity is
/// ignored (dense predictions). Throws on dimension mismatch or when gt has no
/// valid pixels.
EpeReport epe(const FlowField& pred, const FlowField& gt);

std::string epe_report_to_json(const EpeReport& report);

}  // namespace lunagen
