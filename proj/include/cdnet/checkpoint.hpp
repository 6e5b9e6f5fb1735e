#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cdnet/layers.hpp"

namespace cdnet {

/// Binary layout, all integers little-endian:
///   "CDCK" | u32 version | u64 step | f64 lr | u64 seed | u32 len, config bytes
///   | u32 tensor count | per tensor: u32 len, name bytes, u32 rank, u64 extents[rank],
///   f32 values[prod(extents)]
inline constexpr char kCheckpointMagic[4] = {'C', 'D', 'C', 'K'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointMeta {
  std::uint64_t step = 0;
  double lr = 0.0;
  std::uint64_t seed = 0;
  std::string config;  // JSON text describing how to rebuild the model
};

struct NamedTensor {
  std::string name;
  Shape shape;
  std::vector<float> values;
};

struct Checkpoint {
  CheckpointMeta meta;
  std::vector<NamedTensor> tensors;
};

template <typename T>
Checkpoint make_checkpoint(const ParameterSet<T>& params, CheckpointMeta meta);

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
/// Throws FormatError on bad magic, version mismatch (naming found/expected),
/// truncation or trailing bytes.
Checkpoint read_checkpoint(const std::filesystem::path& path);

/// Copies every tensor into `params`. All names and shapes are validated before
/// anything is written, so a failed load leaves the model untouched. Throws
/// FormatError naming the first unknown, missing or mis-shaped tensor.
template <typename T>
void load_parameters(ParameterSet<T>& params, const Checkpoint& checkpoint);

template <typename T>
void save_checkpoint(const std::filesystem::path& path, const ParameterSet<T>& params, CheckpointMeta meta) {
  write_checkpoint(path, make_checkpoint(params, std::move(meta)));
}

}  // namespace cdnet
