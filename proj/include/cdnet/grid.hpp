#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace cdnet {

/// Row-major single-channel 2-D map (probabilities, binary masks, counts).
template <typename T>
struct Grid {
  std::int64_t width = 0;
  std::int64_t height = 0;
  std::vector<T> values;

  Grid() = default;
  Grid(std::int64_t w, std::int64_t h, T fill = T{})
      : width(w), height(h), values(static_cast<std::size_t>(w * h), fill) {
    if (w < 1 || h < 1) throw std::invalid_argument("Grid: extents must be >= 1");
  }

  T& at(std::int64_t x, std::int64_t y) { return values[static_cast<std::size_t>(y * width + x)]; }
  const T& at(std::int64_t x, std::int64_t y) const { return values[static_cast<std::size_t>(y * width + x)]; }
  std::size_t size() const { return values.size(); }
  bool same_size(const auto& other) const { return width == other.width && height == other.height; }

  bool operator==(const Grid&) const = default;
};

using ProbMap = Grid<float>;
using BinaryMap = Grid<std::uint8_t>;  // 0 = unchanged, 1 = changed

}  // namespace cdnet
