#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "cdnet/image_io.hpp"

namespace cdnet {

/// Parameters of one synthetic bi-temporal scene. Photometric fields are
/// maxima in [0,1] intensity units; actual values are drawn per pair.
struct ScenePairSpec {
  std::int64_t size = 256;
  int min_buildings = 6;
  int max_buildings = 14;
  std::int64_t min_building_size = 10;
  std::int64_t max_building_size = 36;
  double change_fraction = 0.3;
  double brightness_shift = 0.15;
  double noise_std = 0.02;
  double tint_shift = 0.08;
  bool rotated = true;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument for out-of-range or degenerate values.
  void validate() const;
};

/// Rotated rectangle footprint; presence differs between epochs for changed buildings.
struct Building {
  double cx = 0.0;
  double cy = 0.0;
  double half_w = 0.0;
  double half_h = 0.0;
  double angle = 0.0;  // radians
  std::array<double, 3> color{};
  bool in_t1 = true;
  bool in_t2 = true;

  bool changed() const { return in_t1 != in_t2; }
  /// Whether the point (x, y) lies inside the footprint.
  bool contains(double x, double y) const;
};

struct ScenePair {
  Image t1;
  Image t2;
  BinaryMap gt;  // 1 where a building was added or removed
  std::vector<Building> buildings;
};

/// Deterministic in `spec` (including its seed). Only structural changes are
/// labelled; brightness, tint and noise differences are not.
ScenePair generate_pair(const ScenePairSpec& spec);

}  // namespace cdnet
