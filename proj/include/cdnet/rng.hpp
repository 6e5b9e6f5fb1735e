#pragma once

#include <cstdint>
#include <random>

#include "cdnet/tensor.hpp"

namespace cdnet {

/// Seeded random stream. Built on mt19937_64, whose output sequence is fixed by
/// the standard, with hand-written uniform/normal transforms so that draws are
/// identical across standard library implementations.
class RngStream {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64+boxmuller";

  explicit RngStream(std::uint64_t seed = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t draws() const { return draws_; }

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  double normal();

  /// Independent child stream, e.g. one per generated image pair.
  RngStream fork(std::uint64_t salt);

 private:
  std::uint64_t seed_;
  std::uint64_t draws_ = 0;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// I.i.d. N(0, std^2) draws. Throws std::invalid_argument unless std > 0.
template <typename T>
Tensor<T> gaussian_init(RngStream& rng, Shape shape, double std);

template <typename T>
Tensor<T> standard_normal(RngStream& rng, Shape shape) {
  return gaussian_init<T>(rng, std::move(shape), 1.0);
}

}  // namespace cdnet
