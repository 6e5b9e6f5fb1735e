#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "cdnet/grid.hpp"

namespace cdnet {

/// 8-bit interleaved image (1 = gray, 3 = RGB).
struct Image {
  std::int64_t width = 0;
  std::int64_t height = 0;
  int channels = 3;
  std::vector<std::uint8_t> pixels;

  Image() = default;
  Image(std::int64_t w, std::int64_t h, int c, std::uint8_t fill = 0);

  std::uint8_t& at(std::int64_t x, std::int64_t y, int c) {
    return pixels[static_cast<std::size_t>((y * width + x) * channels + c)];
  }
  std::uint8_t at(std::int64_t x, std::int64_t y, int c) const {
    return pixels[static_cast<std::size_t>((y * width + x) * channels + c)];
  }
  Image crop(std::int64_t x0, std::int64_t y0, std::int64_t w, std::int64_t h) const;
  bool operator==(const Image&) const = default;
};

/// Throws std::runtime_error on I/O failure.
void write_png(const std::filesystem::path& path, const Image& image);
/// Reads 8-bit gray or RGB (palette, alpha and 16-bit inputs are converted).
Image read_png(const std::filesystem::path& path);

/// 0 -> 0, 1 -> 255.
Image mask_to_image(const BinaryMap& mask);
/// Requires every pixel to be 0 or 255; throws FormatError otherwise.
BinaryMap image_to_mask(const Image& image);
/// round(255 * p), clamped.
Image probability_to_image(const ProbMap& prob);

/// Unquantized probability dump: "CDPM" | u32 width | u32 height | f32 values,
/// little-endian, row-major.
void write_prob_raw(const std::filesystem::path& path, const ProbMap& prob);
ProbMap read_prob_raw(const std::filesystem::path& path);

}  // namespace cdnet
