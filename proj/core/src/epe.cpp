// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0

#include "lunagen/epe.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <nlohmann/json.hpp>

#include "lunagen/error.hpp"

namespace lunagen {

namespace {
double nearest_rank(const std::vector<double>& sorted, double percentile) {
  // 1-based nearest-rank: value at ceil(p/100 * N).
  std::size_t n = sorted.size();
  std::size_t rank = static_cast<std::size_t>(std::ceil(percentile / 100.0 * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  return sorted[rank - 1];
}
}  // namespace

EpeReport epe(const FlowField& pred, const FlowField& gt) {
  require(pred.width == gt.width && pred.height == gt.height, Errc::dimension_mismatch,
          "epe: flow field dimensions differ");

  std::vector<double> errors;
  errors.reserve(gt.u.size());
  for (std::size_t i = 0; i < gt.u.size(); ++i) {
    if (!gt.valid[i]) continue;
    double du = static_cast<double>(pred.u[i]) - gt.u[i];
    double dv = static_cast<double>(pred.v[i]) - gt.v[i];
    errors.push_back(std::sqrt(du * du + dv * dv));
  }
  require(!errors.empty(), Errc::invalid_argument, "epe: ground truth has no valid pixels");

  EpeReport report;
  report.valid_pixels = errors.size();

  // Sorting first makes every statistic exactly permutation invariant
  // (float sums are order sensitive otherwise).
  std::sort(errors.begin(), errors.end());
  double sum = 0.0;
  std::size_t over1 = 0, over3 = 0;
  for (double e : errors) {
    sum += e;
    if (e > 1.0) ++over1;
    if (e > 3.0) ++over3;
  }
  report.mean_epe = sum / static_cast<double>(errors.size());
  report.frac_gt_1px = static_cast<double>(over1) / static_cast<double>(errors.size());
  report.frac_gt_3px = static_cast<double>(over3) / static_cast<double>(errors.size());
  report.p50 = nearest_rank(errors, 50.0);
  report.p90 = nearest_rank(errors, 90.0);
  report.p99 = nearest_rank(errors, 99.0);
  return report;
}

std::string epe_report_to_json(const EpeReport& report) {
  return nlohmann::json{{"mean_epe_px", report.mean_epe},
                        {"p50_px", report.p50},
                        {"p90_px", report.p90},
                        {"p99_px", report.p99},
                        {"frac_gt_1px", report.frac_gt_1px},
                        {"frac_gt_3px", report.frac_gt_3px},
                        {"valid_pixels", report.valid_pixels}}
      .dump(2);
}

}  // namespace lunagen
