// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <vector>

#include "lunagen/geom.hpp"
#include "lunagen/raster.hpp"

namespace lunagen {

/// Regular heightfield raster in the local Cartesian frame. Heights are stored
/// in double precision; the on-disk format is float32 (see raster.hpp).
/// origin is the world position of the center of cell (col 0, row 0); x grows
/// with column index, y with row index.
struct DemGrid {
  int ncols = 0;
  int nrows = 0;
  double cell_size = 0.0;
  double origin_x = 0.0;
  double origin_y = 0.0;
  std::vector<double> heights;  // row-major, ncols * nrows

  double at(int col, int row) const { return heights[static_cast<std::size_t>(row) * ncols + col]; }
  double& at(int col, int row) { return heights[static_cast<std::size_t>(row) * ncols + col]; }

  // Convex coverage spanned by cell centers.
  double x_min() const { return origin_x; }
  double y_min() const { return origin_y; }
  double x_max() const { return origin_x + (ncols - 1) * cell_size; }
  double y_max() const { return origin_y + (nrows - 1) * cell_size; }
  bool contains(double x, double y) const {
    return x >= x_min() && x <= x_max() && y >= y_min() && y <= y_max();
  }

  void validate() const;
};

struct FusionConfig {
  double feather_width = 0.0;  // meters; <0 is invalid
  bool offset_correction = true;
};

DemGrid load_dem(const std::filesystem::path& raster_path,
                 const std::filesystem::path& header_path);
void save_dem(const DemGrid& dem, const std::filesystem::path& raster_path,
              const std::filesystem::path& header_path);

/// Bilinear interpolation of the four surrounding cell-center heights.
/// Throws Errc::out_of_range outside the convex coverage.
double sample_height(const DemGrid& dem, double x, double y);

/// Same interpolation with queries clamped into coverage; used internally
/// where queries sit on the boundary up to floating-point rounding.
double sample_height_clamped(const DemGrid& dem, double x, double y);

/// Unit surface normal from central differences of sample_height with step
/// cell_size; z component positive. Requires (x, y) at least one cell inside
/// the boundary.
Vec3d normal_at(const DemGrid& dem, double x, double y);

/// Bilinear resampling onto a grid with the given cell size covering the same
/// extent (up to one trailing partial cell).
DemGrid resample(const DemGrid& dem, double new_cell_size);

/// Merges a high-resolution DEM into a low-resolution one: output at high's
/// cell size over low's extent. Inside high's footprint (eroded by
/// feather_width) the output is (offset-corrected) high; outside it is
/// resampled low; across the feather band it is a linear blend by distance to
/// the footprint boundary. offset_correction shifts high by mean(low - high)
/// over high's footprint before blending.
DemGrid fuse(const DemGrid& low, const DemGrid& high, const FusionConfig& cfg);

}  // namespace lunagen
