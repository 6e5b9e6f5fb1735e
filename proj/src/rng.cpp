#include "cdnet/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace cdnet {

RngStream::RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

std::uint64_t RngStream::next_u64() {
  ++draws_;
  return engine_();
}

double RngStream::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(next_u64());
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t r;
  do {
    r = next_u64();
  } while (r >= limit);
  return lo + static_cast<std::int64_t>(r % span);
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

RngStream RngStream::fork(std::uint64_t salt) {
  // splitmix64 finalizer over (next draw, salt)
  std::uint64_t z = next_u64() ^ (salt + 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return RngStream(z ^ (z >> 31));
}

template <typename T>
Tensor<T> gaussian_init(RngStream& rng, Shape shape, double std) {
  if (!(std > 0.0)) throw std::invalid_argument("gaussian_init: std must be > 0");
  Tensor<T> out(std::move(shape));
  for (auto& v : out.data()) v = static_cast<T>(std * rng.normal());
  return out;
}

template Tensor<float> gaussian_init(RngStream&, Shape, double);
template Tensor<double> gaussian_init(RngStream&, Shape, double);

}  // namespace cdnet
