// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace lunagen {

template <typename T>
struct Image {
  int width = 0;
  int height = 0;
  std::vector<T> pixels;  // row-major

  Image() = default;
  Image(int w, int h, T fill = T{})
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  T at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  T& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::size_t size() const { return pixels.size(); }
};

using ImageU8 = Image<std::uint8_t>;
using ImageU16 = Image<std::uint16_t>;
using ImageF = Image<float>;

/// Grayscale PNG, 8 or 16 bit.
void save_png(const ImageU8& image, const std::filesystem::path& path);
void save_png(const ImageU16& image, const std::filesystem::path& path);

struct GrayPng {
  int width = 0;
  int height = 0;
  int bit_depth = 0;                  // 8 or 16
  std::vector<std::uint16_t> pixels;  // widened to 16 bits of storage, raw DN
};

/// Loads a grayscale PNG (rejects color and palette images).
GrayPng load_png_gray(const std::filesystem::path& path);

}  // namespace lunagen
