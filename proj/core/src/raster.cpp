// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0

#include "lunagen/raster.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "lunagen/error.hpp"

namespace lunagen {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "raster IO assumes a little-endian host");

void save_raster_f32(const std::filesystem::path& raster_path,
                     const std::filesystem::path& header_path, const RasterGeoref& georef,
                     const std::vector<float>& values) {
  require(georef.ncols >= 1 && georef.nrows >= 1, Errc::invalid_argument,
          "raster: non-positive dimensions");
  require(georef.cell_size > 0.0, Errc::invalid_argument, "raster: non-positive cell size");
  require(values.size() == static_cast<std::size_t>(georef.ncols) * georef.nrows,
          Errc::dimension_mismatch, "raster: value count does not match dimensions");

  json header = {{"ncols", georef.ncols},
                 {"nrows", georef.nrows},
                 {"cell_size_m", georef.cell_size},
                 {"origin_x_m", georef.origin_x},
                 {"origin_y_m", georef.origin_y},
                 {"nodata", nullptr}};
  std::ofstream hout(header_path, std::ios::trunc);
  if (!hout) fail(Errc::io_error, "cannot write raster header: " + header_path.string());
  hout << header.dump(2) << "\n";
  if (!hout) fail(Errc::io_error, "write failed: " + header_path.string());

  std::ofstream rout(raster_path, std::ios::binary | std::ios::trunc);
  if (!rout) fail(Errc::io_error, "cannot write raster: " + raster_path.string());
  rout.write(reinterpret_cast<const char*>(values.data()),
             static_cast<std::streamsize>(values.size() * sizeof(float)));
  if (!rout) fail(Errc::io_error, "write failed: " + raster_path.string());
}

std::vector<float> load_raster_f32(const std::filesystem::path& raster_path,
                                   const std::filesystem::path& header_path,
                                   RasterGeoref* georef) {
  std::ifstream hin(header_path);
  if (!hin) fail(Errc::io_error, "cannot open raster header: " + header_path.string());
  json header;
  try {
    hin >> header;
  } catch (const json::exception& e) {
    fail(Errc::bad_format, "malformed raster header " + header_path.string() + ": " + e.what());
  }

  RasterGeoref g;
  try {
    g.ncols = header.at("ncols").get<int>();
    g.nrows = header.at("nrows").get<int>();
    g.cell_size = header.at("cell_size_m").get<double>();
    g.origin_x = header.at("origin_x_m").get<double>();
    g.origin_y = header.at("origin_y_m").get<double>();
  } catch (const json::exception& e) {
    fail(Errc::bad_format, "raster header missing field in " + header_path.string() + ": " + e.what());
  }
  require(g.ncols >= 1 && g.nrows >= 1, Errc::bad_format,
          "raster header: non-positive dimensions in " + header_path.string());
  require(g.cell_size > 0.0, Errc::bad_format,
          "raster header: non-positive cell size in " + header_path.string());

  std::ifstream rin(raster_path, std::ios::binary | std::ios::ate);
  if (!rin) fail(Errc::io_error, "cannot open raster: " + raster_path.string());
  const auto bytes = static_cast<std::size_t>(rin.tellg());
  const std::size_t expected = static_cast<std::size_t>(g.ncols) * g.nrows * sizeof(float);
  if (bytes != expected)
    fail(Errc::dimension_mismatch, "raster size mismatch in " + raster_path.string() + ": header declares " +
                                       std::to_string(expected) + " bytes, file has " +
                                       std::to_string(bytes));
  rin.seekg(0);
  std::vector<float> values(static_cast<std::size_t>(g.ncols) * g.nrows);
  rin.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(expected));
  if (!rin) fail(Errc::io_error, "read failed: " + raster_path.string());

  if (georef) *georef = g;
  return values;
}

std::filesystem::path sidecar_header_path(const std::filesystem::path& raster_path) {
  std::filesystem::path p = raster_path;
  p.replace_extension(".json");
  return p;
}

}  // namespace lunagen
