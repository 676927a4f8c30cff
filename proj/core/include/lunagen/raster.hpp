// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace lunagen {

/// Georeferencing of a regular raster in the local Cartesian frame. origin is
/// the world position of the center of cell (col 0, row 0); x grows with
/// column, y grows with row.
struct RasterGeoref {
  int ncols = 0;
  int nrows = 0;
  double cell_size = 0.0;  // meters per cell
  double origin_x = 0.0;
  double origin_y = 0.0;
};

/// Raw raster format: little-endian IEEE float32, row-major, with a JSON
/// sidecar header { "ncols", "nrows", "cell_size_m", "origin_x_m",
/// "origin_y_m", "nodata": null }. Non-finite values are permitted at this
/// layer (depth maps use +Inf as the miss sentinel); DEM loading rejects them.
void save_raster_f32(const std::filesystem::path& raster_path,
                     const std::filesystem::path& header_path, const RasterGeoref& georef,
                     const std::vector<float>& values);

std::vector<float> load_raster_f32(const std::filesystem::path& raster_path,
                                   const std::filesystem::path& header_path, RasterGeoref* georef);

/// The conventional sidecar path for `foo.f32` is `foo.json`.
std::filesystem::path sidecar_header_path(const std::filesystem::path& raster_path);

}  // namespace lunagen
