// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0

#include "lunagen/image.hpp"

#include <cstdio>
#include <memory>

#include <png.h>

#include "lunagen/error.hpp"

namespace lunagen {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void write_gray_png(const std::filesystem::path& path, int width, int height, int bit_depth,
                    const unsigned char* data, std::size_t row_bytes) {
  FilePtr fp(std::fopen(path.string().c_str(), "wb"));
  if (!fp) fail(Errc::io_error, "cannot open PNG for writing: " + path.string());

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) fail(Errc::io_error, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    fail(Errc::io_error, "png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(Errc::io_error, "libpng write error for " + path.string());
  }

  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
               bit_depth, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16) png_set_swap(png);  // memory order is host little-endian

  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y)
    rows[static_cast<std::size_t>(y)] =
        const_cast<png_bytep>(data + static_cast<std::size_t>(y) * row_bytes);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

void save_png(const ImageU8& image, const std::filesystem::path& path) {
  require(image.width >= 1 && image.height >= 1, Errc::invalid_argument, "save_png: empty image");
  write_gray_png(path, image.width, image.height, 8,
                 reinterpret_cast<const unsigned char*>(image.pixels.data()),
                 static_cast<std::size_t>(image.width));
}

void save_png(const ImageU16& image, const std::filesystem::path& path) {
  require(image.width >= 1 && image.height >= 1, Errc::invalid_argument, "save_png: empty image");
  write_gray_png(path, image.width, image.height, 16,
                 reinterpret_cast<const unsigned char*>(image.pixels.data()),
                 static_cast<std::size_t>(image.width) * 2);
}

GrayPng load_png_gray(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.string().c_str(), "rb"));
  if (!fp) fail(Errc::io_error, "cannot open PNG: " + path.string());

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) fail(Errc::io_error, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    fail(Errc::io_error, "png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(Errc::bad_format, "libpng read error for " + path.string());
  }

  png_init_io(png, fp.get());
  png_read_info(png, info);

  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  if (color_type != PNG_COLOR_TYPE_GRAY || (bit_depth != 8 && bit_depth != 16)) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(Errc::bad_format, "expected 8/16-bit grayscale PNG: " + path.string());
  }
  if (bit_depth == 16) png_set_swap(png);
  png_read_update_info(png, info);

  GrayPng out;
  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.bit_depth = bit_depth;
  out.pixels.resize(static_cast<std::size_t>(out.width) * out.height);

  std::vector<std::uint8_t> row(png_get_rowbytes(png, info));
  for (int y = 0; y < out.height; ++y) {
    png_read_row(png, row.data(), nullptr);
    if (bit_depth == 8) {
      for (int x = 0; x < out.width; ++x)
        out.pixels[static_cast<std::size_t>(y) * out.width + x] = row[static_cast<std::size_t>(x)];
    } else {
      const auto* row16 = reinterpret_cast<const std::uint16_t*>(row.data());
      for (int x = 0; x < out.width; ++x)
        out.pixels[static_cast<std::size_t>(y) * out.width + x] = row16[x];
    }
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

}  // namespace lunagen
