#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cdnet/image_io.hpp"
#include "cdnet/rng.hpp"
#include "cdnet/synth.hpp"
#include "cdnet/tensor.hpp"
#include "cdnet/tiling.hpp"

namespace cdnet {

struct PairSample {
  Image t1;
  Image t2;
  BinaryMap gt;
};

struct PatchSample {
  TileOrigin origin;
  PairSample patch;
};

/// `count` random windows of patch_size, each applied identically to t1, t2 and
/// gt. Throws std::invalid_argument if the patch exceeds the image or the three
/// inputs differ in size.
std::vector<PatchSample> crop_patches(const PairSample& pair, std::int64_t patch_size, std::int64_t count,
                                      RngStream& rng);

struct ManifestRecord {
  std::string t1;
  std::string t2;
  std::string gt;
  std::string split;  // "train", "val" or "test"
};

/// JSON-lines manifest; record paths are relative to the manifest's directory.
struct Manifest {
  std::filesystem::path directory;
  std::vector<ManifestRecord> records;

  std::vector<ManifestRecord> split(const std::string& tag) const;
  PairSample load(const ManifestRecord& record) const;
};

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestRecord>& records);
/// Parses the manifest and checks that every referenced file exists and that the
/// three images of each record share dimensions. Throws FormatError otherwise.
Manifest read_manifest(const std::filesystem::path& path);

/// Split tags for n items: a seeded shuffle with round(train_fraction * n) train items.
std::vector<std::string> assign_splits(std::size_t n, double train_fraction, RngStream& rng);

struct DatasetSpec {
  std::int64_t pairs = 10;
  std::int64_t size = 256;
  double change_fraction = 0.3;
  std::uint64_t seed = 0;
  double train_fraction = 0.8;
  ScenePairSpec scene;  // size, change_fraction and seed are overwritten per pair
};

/// Writes pairs/NNNN_{t1,t2,gt}.png and manifest.jsonl under `out_dir`.
Manifest generate_dataset(const std::filesystem::path& out_dir, const DatasetSpec& spec);

/// [1,C,H,W] with 8-bit values mapped to [-1, 1].
template <typename T>
Tensor<T> image_to_tensor(const Image& image);
/// [1,1,H,W] with values 0/1.
template <typename T>
Tensor<T> mask_to_tensor(const BinaryMap& mask);
/// Concatenates [1,...] tensors along the batch axis.
template <typename T>
Tensor<T> stack_batch(const std::vector<Tensor<T>>& items);
/// Channel 0 of sample `n` of a [N,C,H,W] tensor.
template <typename T>
ProbMap tensor_to_map(const Tensor<T>& t, std::int64_t n = 0);

}  // namespace cdnet
