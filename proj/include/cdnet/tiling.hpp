#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "cdnet/grid.hpp"

namespace cdnet {

struct TileOrigin {
  std::int64_t x = 0;
  std::int64_t y = 0;
  bool operator==(const TileOrigin&) const = default;
};

/// Raster-scan windows over an image. The last window on each axis is clamped
/// to the border when the regular grid does not reach it.
struct TilePlan {
  std::int64_t width = 0;
  std::int64_t height = 0;
  std::int64_t patch = 0;
  std::int64_t stride = 0;
  std::vector<std::int64_t> x_origins;
  std::vector<std::int64_t> y_origins;
  std::vector<TileOrigin> windows;  // row-major over (y, x)
  Grid<std::int32_t> coverage;      // windows containing each pixel
};

/// Origins {0, stride, 2*stride, ...} per axis plus a final clamped origin.
/// Throws std::invalid_argument if the patch exceeds the image or stride < 1.
std::vector<std::int64_t> axis_origins(std::int64_t extent, std::int64_t patch, std::int64_t stride);
TilePlan plan_tiles(std::int64_t width, std::int64_t height, std::int64_t patch, std::int64_t stride);

struct PatchPrediction {
  TileOrigin origin;
  ProbMap values;  // patch x patch
};

/// Per-pixel arithmetic mean of all window predictions covering the pixel.
/// Accumulates in plan order, so the result does not depend on the order of
/// `patches`. Throws std::invalid_argument on a missing, duplicate, or
/// mis-sized window.
ProbMap stitch(const std::vector<PatchPrediction>& patches, const TilePlan& plan);

/// Changed iff value > t. Throws std::invalid_argument unless t is in [0,1].
BinaryMap threshold(const ProbMap& prob, double t);

/// Maps a tanh-range map in [-1,1] to [0,1].
ProbMap tanh_to_probability(const ProbMap& map);

/// Runs `predict(origin)` for every window of `plan` and stitches the results.
ProbMap tiled_predict(const TilePlan& plan, const std::function<ProbMap(const TileOrigin&)>& predict);

}  // namespace cdnet
