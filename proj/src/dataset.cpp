#include "cdnet/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "cdnet/errors.hpp"

namespace cdnet {

namespace fs = std::filesystem;

std::vector<PatchSample> crop_patches(const PairSample& pair, std::int64_t patch_size, std::int64_t count,
                                      RngStream& rng) {
  const std::int64_t w = pair.t1.width, h = pair.t1.height;
  if (pair.t2.width != w || pair.t2.height != h || pair.gt.width != w || pair.gt.height != h) {
    throw std::invalid_argument("crop_patches: t1, t2 and gt differ in size");
  }
  if (patch_size < 1 || patch_size > w || patch_size > h) {
    throw std::invalid_argument("crop_patches: patch size " + std::to_string(patch_size) + " does not fit a " +
                                std::to_string(w) + "x" + std::to_string(h) + " image");
  }
  if (count < 0) throw std::invalid_argument("crop_patches: negative count");
  std::vector<PatchSample> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    const auto x0 = rng.uniform_int(0, w - patch_size);
    const auto y0 = rng.uniform_int(0, h - patch_size);
    PatchSample s;
    s.origin = {x0, y0};
    s.patch.t1 = pair.t1.crop(x0, y0, patch_size, patch_size);
    s.patch.t2 = pair.t2.crop(x0, y0, patch_size, patch_size);
    s.patch.gt = BinaryMap(patch_size, patch_size, 0);
    for (std::int64_t y = 0; y < patch_size; ++y) {
      for (std::int64_t x = 0; x < patch_size; ++x) s.patch.gt.at(x, y) = pair.gt.at(x0 + x, y0 + y);
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ManifestRecord> Manifest::split(const std::string& tag) const {
  std::vector<ManifestRecord> out;
  for (const auto& r : records) {
    if (r.split == tag) out.push_back(r);
  }
  return out;
}

PairSample Manifest::load(const ManifestRecord& record) const {
  PairSample s;
  s.t1 = read_png(directory / record.t1);
  s.t2 = read_png(directory / record.t2);
  s.gt = image_to_mask(read_png(directory / record.gt));
  if (s.t1.channels != 3 || s.t2.channels != 3) throw FormatError("manifest: scene images must be RGB");
  if (s.t1.width != s.t2.width || s.t1.height != s.t2.height || s.gt.width != s.t1.width ||
      s.gt.height != s.t1.height) {
    throw FormatError("manifest: record " + record.t1 + " has images of different sizes");
  }
  return s;
}

void write_manifest(const fs::path& path, const std::vector<ManifestRecord>& records) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_manifest: cannot open " + path.string());
  for (const auto& r : records) {
    os << nlohmann::json{{"t1", r.t1}, {"t2", r.t2}, {"gt", r.gt}, {"split", r.split}}.dump() << '\n';
  }
}

Manifest read_manifest(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("read_manifest: cannot open " + path.string());
  Manifest m;
  m.directory = path.parent_path();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      m.records.push_back({j.at("t1").get<std::string>(), j.at("t2").get<std::string>(),
                           j.at("gt").get<std::string>(), j.at("split").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("read_manifest: line " + std::to_string(line_no) + ": " + e.what());
    }
    const auto& r = m.records.back();
    if (r.split != "train" && r.split != "val" && r.split != "test") {
      throw FormatError("read_manifest: line " + std::to_string(line_no) + ": unknown split '" + r.split + "'");
    }
    for (const auto* p : {&r.t1, &r.t2, &r.gt}) {
      if (!fs::exists(m.directory / *p)) {
        throw FormatError("read_manifest: line " + std::to_string(line_no) + ": missing file " +
                          (m.directory / *p).string());
      }
    }
    m.load(r);
  }
  return m;
}

std::vector<std::string> assign_splits(std::size_t n, double train_fraction, RngStream& rng) {
  if (!(train_fraction >= 0.0 && train_fraction <= 1.0)) {
    throw std::invalid_argument("assign_splits: train_fraction must lie in [0,1]");
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto j = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(n - 1)));
    std::swap(order[i], order[j]);
  }
  const auto n_train = static_cast<std::size_t>(std::lround(train_fraction * static_cast<double>(n)));
  std::vector<std::string> tags(n, "val");
  for (std::size_t i = 0; i < n_train; ++i) tags[order[i]] = "train";
  return tags;
}

Manifest generate_dataset(const fs::path& out_dir, const DatasetSpec& spec) {
  if (spec.pairs < 1) throw std::invalid_argument("generate_dataset: need at least one pair");
  fs::create_directories(out_dir / "pairs");
  RngStream master(spec.seed);
  RngStream split_rng = master.fork(0);
  const auto tags = assign_splits(static_cast<std::size_t>(spec.pairs), spec.train_fraction, split_rng);
  std::vector<ManifestRecord> records;
  for (std::int64_t i = 0; i < spec.pairs; ++i) {
    ScenePairSpec scene = spec.scene;
    scene.size = spec.size;
    scene.change_fraction = spec.change_fraction;
    scene.seed = master.fork(static_cast<std::uint64_t>(i) + 1).seed();
    const ScenePair pair = generate_pair(scene);
    char stem[32];
    std::snprintf(stem, sizeof stem, "pairs/%04lld", static_cast<long long>(i));
    ManifestRecord r{std::string(stem) + "_t1.png", std::string(stem) + "_t2.png", std::string(stem) + "_gt.png",
                     tags[static_cast<std::size_t>(i)]};
    write_png(out_dir / r.t1, pair.t1);
    write_png(out_dir / r.t2, pair.t2);
    write_png(out_dir / r.gt, mask_to_image(pair.gt));
    records.push_back(r);
  }
  write_manifest(out_dir / "manifest.jsonl", records);
  return Manifest{out_dir, records};
}

template <typename T>
Tensor<T> image_to_tensor(const Image& image) {
  const std::int64_t c = image.channels, h = image.height, w = image.width;
  Tensor<T> t(Shape{1, c, h, w});
  for (std::int64_t ch = 0; ch < c; ++ch) {
    for (std::int64_t y = 0; y < h; ++y) {
      for (std::int64_t x = 0; x < w; ++x) {
        t.at(0, ch, y, x) = static_cast<T>(image.at(x, y, static_cast<int>(ch)) / 127.5 - 1.0);
      }
    }
  }
  return t;
}

template <typename T>
Tensor<T> mask_to_tensor(const BinaryMap& mask) {
  Tensor<T> t(Shape{1, 1, mask.height, mask.width});
  for (std::size_t i = 0; i < mask.size(); ++i) t[static_cast<std::int64_t>(i)] = mask.values[i] ? T(1) : T(0);
  return t;
}

template <typename T>
Tensor<T> stack_batch(const std::vector<Tensor<T>>& items) {
  if (items.empty()) throw std::invalid_argument("stack_batch: no items");
  Shape shape = items.front().shape();
  std::vector<T> data;
  for (const auto& t : items) {
    Shape s = t.shape();
    s[0] = shape[0];
    if (s != shape) throw ShapeError("stack_batch: " + shape_str(t.shape()) + " vs " + shape_str(shape));
    data.insert(data.end(), t.data().begin(), t.data().end());
  }
  shape[0] = 0;
  for (const auto& t : items) shape[0] += t.dim(0);
  return Tensor<T>(shape, std::move(data));
}

template <typename T>
ProbMap tensor_to_map(const Tensor<T>& t, std::int64_t n) {
  require_rank4(t, "tensor_to_map");
  ProbMap out(t.dim(3), t.dim(2), 0.0f);
  for (std::int64_t y = 0; y < t.dim(2); ++y) {
    for (std::int64_t x = 0; x < t.dim(3); ++x) out.at(x, y) = static_cast<float>(t.at(n, 0, y, x));
  }
  return out;
}

template Tensor<float> image_to_tensor(const Image&);
template Tensor<double> image_to_tensor(const Image&);
template Tensor<float> mask_to_tensor(const BinaryMap&);
template Tensor<double> mask_to_tensor(const BinaryMap&);
template Tensor<float> stack_batch(const std::vector<Tensor<float>>&);
template Tensor<double> stack_batch(const std::vector<Tensor<double>>&);
template ProbMap tensor_to_map(const Tensor<float>&, std::int64_t);
template ProbMap tensor_to_map(const Tensor<double>&, std::int64_t);

}  // namespace cdnet
