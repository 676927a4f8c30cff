// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0

#include "lunagen/dem.hpp"

#include <algorithm>
#include <cmath>

#include "lunagen/error.hpp"
#include "lunagen/threading.hpp"

namespace lunagen {

namespace {

// Cell-center coordinate tolerance for boundary queries, relative to cell size.
constexpr double kEdgeTol = 1e-9;

double bilinear(const DemGrid& dem, double x, double y) {
  double u = (x - dem.origin_x) / dem.cell_size;
  double v = (y - dem.origin_y) / dem.cell_size;
  int c0 = static_cast<int>(std::floor(u));
  int r0 = static_cast<int>(std::floor(v));
  c0 = std::clamp(c0, 0, dem.ncols - 2 >= 0 ? dem.ncols - 2 : 0);
  r0 = std::clamp(r0, 0, dem.nrows - 2 >= 0 ? dem.nrows - 2 : 0);
  double fu = u - c0;
  double fv = v - r0;
  if (dem.ncols == 1) fu = 0.0;
  if (dem.nrows == 1) fv = 0.0;
  int c1 = std::min(c0 + 1, dem.ncols - 1);
  int r1 = std::min(r0 + 1, dem.nrows - 1);
  double h00 = dem.at(c0, r0), h10 = dem.at(c1, r0);
  double h01 = dem.at(c0, r1), h11 = dem.at(c1, r1);
  return (1.0 - fv) * ((1.0 - fu) * h00 + fu * h10) + fv * ((1.0 - fu) * h01 + fu * h11);
}

// Output grid dimension for a coverage of `extent` meters at `cell` meters per
// cell: last center must not exceed the extent (tolerating rounding).
int covering_dim(double extent, double cell) {
  return static_cast<int>(std::floor(extent / cell + kEdgeTol)) + 1;
}

}  // namespace

void DemGrid::validate() const {
  require(ncols >= 1 && nrows >= 1, Errc::invalid_argument, "dem: non-positive dimensions");
  require(cell_size > 0.0, Errc::invalid_argument, "dem: cell_size must be positive");
  require(heights.size() == static_cast<std::size_t>(ncols) * nrows, Errc::dimension_mismatch,
          "dem: height count does not match dimensions");
  for (double h : heights)
    require(std::isfinite(h), Errc::invalid_argument, "dem: non-finite height value");
}

DemGrid load_dem(const std::filesystem::path& raster_path,
                 const std::filesystem::path& header_path) {
  RasterGeoref g;
  std::vector<float> values = load_raster_f32(raster_path, header_path, &g);
  DemGrid dem;
  dem.ncols = g.ncols;
  dem.nrows = g.nrows;
  dem.cell_size = g.cell_size;
  dem.origin_x = g.origin_x;
  dem.origin_y = g.origin_y;
  dem.heights.assign(values.begin(), values.end());
  for (double h : dem.heights)
    require(std::isfinite(h), Errc::bad_format,
            "dem: non-finite height in " + raster_path.string());
  return dem;
}

void save_dem(const DemGrid& dem, const std::filesystem::path& raster_path,
              const std::filesystem::path& header_path) {
  dem.validate();
  RasterGeoref g{dem.ncols, dem.nrows, dem.cell_size, dem.origin_x, dem.origin_y};
  std::vector<float> values(dem.heights.begin(), dem.heights.end());
  save_raster_f32(raster_path, header_path, g, values);
}

double sample_height(const DemGrid& dem, double x, double y) {
  double tol = kEdgeTol * dem.cell_size;
  if (x < dem.x_min() - tol || x > dem.x_max() + tol || y < dem.y_min() - tol ||
      y > dem.y_max() + tol)
    fail(Errc::out_of_range, "sample_height: query outside DEM coverage");
  return bilinear(dem, x, y);
}

double sample_height_clamped(const DemGrid& dem, double x, double y) {
  x = std::clamp(x, dem.x_min(), dem.x_max());
  y = std::clamp(y, dem.y_min(), dem.y_max());
  return bilinear(dem, x, y);
}

Vec3d normal_at(const DemGrid& dem, double x, double y) {
  double s = dem.cell_size;
  double tol = kEdgeTol * s;
  if (x < dem.x_min() + s - tol || x > dem.x_max() - s + tol || y < dem.y_min() + s - tol ||
      y > dem.y_max() - s + tol)
    fail(Errc::out_of_range, "normal_at: query closer than one cell to the boundary");
  double dzdx = (bilinear(dem, x + s, y) - bilinear(dem, x - s, y)) / (2.0 * s);
  double dzdy = (bilinear(dem, x, y + s) - bilinear(dem, x, y - s)) / (2.0 * s);
  return Vec3d(-dzdx, -dzdy, 1.0).normalized();
}

DemGrid resample(const DemGrid& dem, double new_cell_size) {
  require(new_cell_size > 0.0, Errc::invalid_argument, "resample: non-positive cell size");
  dem.validate();

  DemGrid out;
  out.cell_size = new_cell_size;
  out.origin_x = dem.origin_x;
  out.origin_y = dem.origin_y;
  out.ncols = covering_dim((dem.ncols - 1) * dem.cell_size, new_cell_size);
  out.nrows = covering_dim((dem.nrows - 1) * dem.cell_size, new_cell_size);
  out.heights.resize(static_cast<std::size_t>(out.ncols) * out.nrows);

  parallel_for_chunks(static_cast<std::size_t>(out.nrows), 0, [&](std::size_t r0, std::size_t r1) {
    for (std::size_t r = r0; r < r1; ++r) {
      double y = out.origin_y + static_cast<double>(r) * new_cell_size;
      for (int c = 0; c < out.ncols; ++c) {
        double x = out.origin_x + c * new_cell_size;
        out.heights[r * out.ncols + c] = sample_height_clamped(dem, x, y);
      }
    }
  });
  return out;
}

DemGrid fuse(const DemGrid& low, const DemGrid& high, const FusionConfig& cfg) {
  low.validate();
  high.validate();
  require(cfg.feather_width >= 0.0, Errc::invalid_argument, "fuse: negative feather width");
  require(high.x_min() >= low.x_min() && high.x_max() <= low.x_max() &&
              high.y_min() >= low.y_min() && high.y_max() <= low.y_max(),
          Errc::invalid_argument, "fuse: high DEM extent not contained in low DEM extent");
  require(high.ncols >= 2 && high.nrows >= 2, Errc::invalid_argument,
          "fuse: high DEM footprint is degenerate");

  // Vertical datum correction: mean(low - high) sampled on high's grid.
  double offset = 0.0;
  if (cfg.offset_correction) {
    double sum = 0.0;
    for (int r = 0; r < high.nrows; ++r) {
      double y = high.origin_y + r * high.cell_size;
      for (int c = 0; c < high.ncols; ++c) {
        double x = high.origin_x + c * high.cell_size;
        sum += sample_height_clamped(low, x, y) - high.at(c, r);
      }
    }
    offset = sum / (static_cast<double>(high.ncols) * high.nrows);
  }

  DemGrid out;
  out.cell_size = high.cell_size;
  out.origin_x = low.origin_x;
  out.origin_y = low.origin_y;
  out.ncols = covering_dim((low.ncols - 1) * low.cell_size, high.cell_size);
  out.nrows = covering_dim((low.nrows - 1) * low.cell_size, high.cell_size);
  out.heights.resize(static_cast<std::size_t>(out.ncols) * out.nrows);

  const double fw = cfg.feather_width;
  parallel_for_chunks(static_cast<std::size_t>(out.nrows), 0, [&](std::size_t r0, std::size_t r1) {
    for (std::size_t r = r0; r < r1; ++r) {
      double y = out.origin_y + static_cast<double>(r) * out.cell_size;
      for (int c = 0; c < out.ncols; ++c) {
        double x = out.origin_x + c * out.cell_size;
        // Signed distance into high's footprint (positive inside).
        double d = std::min(std::min(x - high.x_min(), high.x_max() - x),
                            std::min(y - high.y_min(), high.y_max() - y));
        double value;
        if (d < 0.0) {
          value = sample_height_clamped(low, x, y);
        } else if (fw <= 0.0 || d >= fw) {
          value = sample_height_clamped(high, x, y) + offset;
        } else {
          double a = d / fw;
          value = a * (sample_height_clamped(high, x, y) + offset) +
                  (1.0 - a) * sample_height_clamped(low, x, y);
        }
        out.heights[r * out.ncols + c] = value;
      }
    }
  });
  return out;
}

}  // namespace lunagen
