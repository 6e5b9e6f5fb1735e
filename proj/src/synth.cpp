#include "cdnet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cdnet/rng.hpp"

namespace cdnet {

namespace {

struct Box {
  double x0, y0, x1, y1;
};

Box bounds(const Building& b) {
  const double c = std::abs(std::cos(b.angle)), s = std::abs(std::sin(b.angle));
  const double ex = b.half_w * c + b.half_h * s;
  const double ey = b.half_w * s + b.half_h * c;
  return {b.cx - ex, b.cy - ey, b.cx + ex, b.cy + ey};
}

bool overlaps(const Box& a, const Box& b, double margin) {
  return a.x0 - margin < b.x1 && b.x0 - margin < a.x1 && a.y0 - margin < b.y1 && b.y0 - margin < a.y1;
}

std::uint8_t quantize(double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); }

}  // namespace

void ScenePairSpec::validate() const {
  if (size < 8) throw std::invalid_argument("ScenePairSpec: size must be >= 8");
  if (min_buildings < 0 || max_buildings < min_buildings) {
    throw std::invalid_argument("ScenePairSpec: building count range is empty");
  }
  if (min_building_size < 2 || max_building_size < min_building_size) {
    throw std::invalid_argument("ScenePairSpec: building size range is empty");
  }
  if (max_building_size > size) {
    throw std::invalid_argument("ScenePairSpec: building size " + std::to_string(max_building_size) +
                                " exceeds image size " + std::to_string(size));
  }
  if (!(change_fraction >= 0.0 && change_fraction <= 1.0)) {
    throw std::invalid_argument("ScenePairSpec: change_fraction must lie in [0,1]");
  }
  if (brightness_shift < 0.0 || noise_std < 0.0 || tint_shift < 0.0) {
    throw std::invalid_argument("ScenePairSpec: jitter magnitudes must be non-negative");
  }
}

bool Building::contains(double x, double y) const {
  const double dx = x - cx, dy = y - cy;
  const double c = std::cos(angle), s = std::sin(angle);
  const double u = c * dx + s * dy;
  const double v = -s * dx + c * dy;
  return std::abs(u) <= half_w && std::abs(v) <= half_h;
}

ScenePair generate_pair(const ScenePairSpec& spec) {
  spec.validate();
  RngStream rng(spec.seed);
  const std::int64_t n = spec.size;
  const auto side = static_cast<double>(n);

  // Shared background: base colour, low-frequency texture and fine grain.
  const std::array<double, 3> base = {rng.uniform(0.25, 0.45), rng.uniform(0.3, 0.5), rng.uniform(0.2, 0.4)};
  struct Wave {
    double fx, fy, phase, amp;
  };
  std::vector<Wave> waves;
  for (int i = 0; i < 4; ++i) {
    waves.push_back({rng.uniform(-0.08, 0.08), rng.uniform(-0.08, 0.08), rng.uniform(0.0, 2.0 * std::numbers::pi),
                     rng.uniform(0.02, 0.06)});
  }
  std::vector<double> texture(static_cast<std::size_t>(n * n));
  for (std::int64_t y = 0; y < n; ++y) {
    for (std::int64_t x = 0; x < n; ++x) {
      double t = 0.03 * rng.normal();
      for (const auto& w : waves) t += w.amp * std::sin(w.fx * x + w.fy * y + w.phase);
      texture[static_cast<std::size_t>(y * n + x)] = t;
    }
  }

  // Non-overlapping footprints.
  ScenePair out;
  const auto target = rng.uniform_int(spec.min_buildings, spec.max_buildings);
  std::vector<Box> boxes;
  for (std::int64_t i = 0; i < target; ++i) {
    for (int attempt = 0; attempt < 100; ++attempt) {
      Building b;
      b.half_w = 0.5 * static_cast<double>(rng.uniform_int(spec.min_building_size, spec.max_building_size));
      b.half_h = 0.5 * static_cast<double>(rng.uniform_int(spec.min_building_size, spec.max_building_size));
      b.angle = spec.rotated ? rng.uniform(0.0, std::numbers::pi / 2.0) : 0.0;
      Box box = bounds(b);
      if (box.x1 - box.x0 > side || box.y1 - box.y0 > side) {
        b.angle = 0.0;
        box = bounds(b);
      }
      const double ex = 0.5 * (box.x1 - box.x0), ey = 0.5 * (box.y1 - box.y0);
      b.cx = rng.uniform(ex, side - ex);
      b.cy = rng.uniform(ey, side - ey);
      box = bounds(b);
      if (std::any_of(boxes.begin(), boxes.end(), [&](const Box& o) { return overlaps(box, o, 2.0); })) continue;
      const double roof = rng.uniform(0.55, 0.9);
      b.color = {roof, roof * rng.uniform(0.8, 1.0), roof * rng.uniform(0.75, 1.0)};
      boxes.push_back(box);
      out.buildings.push_back(b);
      break;
    }
  }

  // Pick the changed subset: each changed building is either new at t2 or gone at t2.
  const std::size_t k = out.buildings.size();
  const auto changed = static_cast<std::size_t>(std::lround(spec.change_fraction * static_cast<double>(k)));
  std::vector<std::size_t> order(k);
  for (std::size_t i = 0; i < k; ++i) order[i] = i;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(k - 1)));
    std::swap(order[i], order[j]);
  }
  for (std::size_t i = 0; i < changed; ++i) {
    auto& b = out.buildings[order[i]];
    if (rng.uniform() < 0.5) b.in_t1 = false;
    else b.in_t2 = false;
  }

  // Photometric jitter for t2 only.
  const double brightness = rng.uniform(-spec.brightness_shift, spec.brightness_shift);
  std::array<double, 3> tint{};
  for (auto& t : tint) t = rng.uniform(-spec.tint_shift, spec.tint_shift);

  out.t1 = Image(n, n, 3);
  out.t2 = Image(n, n, 3);
  out.gt = BinaryMap(n, n, 0);
  for (std::int64_t y = 0; y < n; ++y) {
    for (std::int64_t x = 0; x < n; ++x) {
      const double px = static_cast<double>(x) + 0.5, py = static_cast<double>(y) + 0.5;
      const Building* at1 = nullptr;
      const Building* at2 = nullptr;
      bool change = false;
      for (const auto& b : out.buildings) {
        if (!b.contains(px, py)) continue;
        if (b.in_t1) at1 = &b;
        if (b.in_t2) at2 = &b;
        change = change || b.changed();
      }
      out.gt.at(x, y) = change ? 1 : 0;
      const double tex = texture[static_cast<std::size_t>(y * n + x)];
      for (int c = 0; c < 3; ++c) {
        const double ground = base[static_cast<std::size_t>(c)] + tex;
        const double v1 = at1 ? at1->color[static_cast<std::size_t>(c)] : ground;
        const double v2 = at2 ? at2->color[static_cast<std::size_t>(c)] : ground;
        out.t1.at(x, y, c) = quantize(v1 + spec.noise_std * rng.normal());
        out.t2.at(x, y, c) =
            quantize(v2 + brightness + tint[static_cast<std::size_t>(c)] + spec.noise_std * rng.normal());
      }
    }
  }
  return out;
}

}  // namespace cdnet
