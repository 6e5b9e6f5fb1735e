#include "cdnet/tiling.hpp"

#include <stdexcept>
#include <string>

namespace cdnet {

std::vector<std::int64_t> axis_origins(std::int64_t extent, std::int64_t patch, std::int64_t stride) {
  if (patch < 1 || stride < 1) throw std::invalid_argument("plan_tiles: patch and stride must be positive");
  if (patch > extent) {
    throw std::invalid_argument("plan_tiles: patch " + std::to_string(patch) + " larger than image extent " +
                                std::to_string(extent));
  }
  std::vector<std::int64_t> origins;
  for (std::int64_t o = 0; o + patch <= extent; o += stride) origins.push_back(o);
  if (origins.back() + patch < extent) origins.push_back(extent - patch);
  return origins;
}

TilePlan plan_tiles(std::int64_t width, std::int64_t height, std::int64_t patch, std::int64_t stride) {
  TilePlan plan;
  plan.width = width;
  plan.height = height;
  plan.patch = patch;
  plan.stride = stride;
  plan.x_origins = axis_origins(width, patch, stride);
  plan.y_origins = axis_origins(height, patch, stride);
  plan.coverage = Grid<std::int32_t>(width, height, 0);
  for (auto y0 : plan.y_origins) {
    for (auto x0 : plan.x_origins) {
      plan.windows.push_back({x0, y0});
      for (std::int64_t y = y0; y < y0 + patch; ++y) {
        for (std::int64_t x = x0; x < x0 + patch; ++x) ++plan.coverage.at(x, y);
      }
    }
  }
  return plan;
}

ProbMap stitch(const std::vector<PatchPrediction>& patches, const TilePlan& plan) {
  std::vector<const PatchPrediction*> ordered(plan.windows.size(), nullptr);
  for (const auto& p : patches) {
    std::size_t k = 0;
    while (k < plan.windows.size() && !(plan.windows[k] == p.origin)) ++k;
    if (k == plan.windows.size()) {
      throw std::invalid_argument("stitch: patch at (" + std::to_string(p.origin.x) + "," +
                                  std::to_string(p.origin.y) + ") is not in the plan");
    }
    if (ordered[k]) throw std::invalid_argument("stitch: duplicate patch for a window");
    if (p.values.width != plan.patch || p.values.height != plan.patch) {
      throw std::invalid_argument("stitch: patch map does not match the planned patch size");
    }
    ordered[k] = &p;
  }
  Grid<double> acc(plan.width, plan.height, 0.0);
  for (std::size_t k = 0; k < ordered.size(); ++k) {
    if (!ordered[k]) {
      throw std::invalid_argument("stitch: missing prediction for window (" + std::to_string(plan.windows[k].x) +
                                  "," + std::to_string(plan.windows[k].y) + ")");
    }
    const auto& p = *ordered[k];
    for (std::int64_t y = 0; y < plan.patch; ++y) {
      for (std::int64_t x = 0; x < plan.patch; ++x) acc.at(p.origin.x + x, p.origin.y + y) += p.values.at(x, y);
    }
  }
  ProbMap out(plan.width, plan.height, 0.0f);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.values[i] = static_cast<float>(acc.values[i] / plan.coverage.values[i]);
  }
  return out;
}

BinaryMap threshold(const ProbMap& prob, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("threshold: t must lie in [0,1]");
  BinaryMap out(prob.width, prob.height, 0);
  for (std::size_t i = 0; i < prob.size(); ++i) out.values[i] = static_cast<double>(prob.values[i]) > t ? 1 : 0;
  return out;
}

ProbMap tanh_to_probability(const ProbMap& map) {
  ProbMap out = map;
  for (auto& v : out.values) v = 0.5f * (v + 1.0f);
  return out;
}

ProbMap tiled_predict(const TilePlan& plan, const std::function<ProbMap(const TileOrigin&)>& predict) {
  std::vector<PatchPrediction> patches;
  patches.reserve(plan.windows.size());
  for (const auto& o : plan.windows) patches.push_back({o, predict(o)});
  return stitch(patches, plan);
}

}  // namespace cdnet
