#include "cdnet/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "cdnet/errors.hpp"

namespace cdnet {

namespace {

class Writer {
 public:
  template <typename U>
  void put(U value) {
    static_assert(std::is_integral_v<U>);
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      bytes_.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff));
    }
  }
  void put_f32(float v) { put(std::bit_cast<std::uint32_t>(v)); }
  void put_f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }
  void put_string(const std::string& s) {
    put(static_cast<std::uint32_t>(s.size()));
    bytes_.insert(bytes_.end(), s.begin(), s.end());
  }
  void put_raw(const char* p, std::size_t n) { bytes_.insert(bytes_.end(), p, p + n); }
  const std::vector<char>& bytes() const { return bytes_; }

 private:
  std::vector<char> bytes_;
};

class Reader {
 public:
  Reader(std::vector<char> bytes, std::string source) : bytes_(std::move(bytes)), source_(std::move(source)) {}

  template <typename U>
  U get() {
    need(sizeof(U));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(U);
    return static_cast<U>(v);
  }
  float get_f32() { return std::bit_cast<float>(get<std::uint32_t>()); }
  double get_f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
  std::string get_string() {
    const auto n = get<std::uint32_t>();
    need(n);
    std::string s(bytes_.data() + pos_, n);
    pos_ += n;
    return s;
  }
  void get_raw(char* out, std::size_t n) {
    need(n);
    std::memcpy(out, bytes_.data() + pos_, n);
    pos_ += n;
  }
  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) {
      throw FormatError("checkpoint " + source_ + " is truncated at byte " + std::to_string(pos_));
    }
  }
  std::vector<char> bytes_;
  std::string source_;
  std::size_t pos_ = 0;
};

}  // namespace

template <typename T>
Checkpoint make_checkpoint(const ParameterSet<T>& params, CheckpointMeta meta) {
  Checkpoint ck;
  ck.meta = std::move(meta);
  for (const auto& e : params.entries()) {
    const auto& v = e.var.value();
    ck.tensors.push_back({e.name, v.shape(), std::vector<float>(v.data().begin(), v.data().end())});
  }
  return ck;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  Writer w;
  w.put_raw(kCheckpointMagic, 4);
  w.put(kCheckpointVersion);
  w.put(ck.meta.step);
  w.put_f64(ck.meta.lr);
  w.put(ck.meta.seed);
  w.put_string(ck.meta.config);
  w.put(static_cast<std::uint32_t>(ck.tensors.size()));
  for (const auto& t : ck.tensors) {
    if (static_cast<std::int64_t>(t.values.size()) != shape_numel(t.shape)) {
      throw ShapeError("write_checkpoint: tensor " + t.name + " has inconsistent length");
    }
    w.put_string(t.name);
    w.put(static_cast<std::uint32_t>(t.shape.size()));
    for (auto e : t.shape) w.put(static_cast<std::uint64_t>(e));
    for (float v : t.values) w.put_f32(v);
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("write_checkpoint: cannot open " + path.string());
  os.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
  if (!os) throw std::runtime_error("write_checkpoint: write failed for " + path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_checkpoint: cannot open " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  Reader r(std::move(bytes), path.string());
  char magic[4];
  r.get_raw(magic, 4);
  if (std::memcmp(magic, kCheckpointMagic, 4) != 0) throw FormatError("read_checkpoint: bad magic in " + path.string());
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw FormatError("read_checkpoint: found format version " + std::to_string(version) + ", expected " +
                      std::to_string(kCheckpointVersion));
  }
  Checkpoint ck;
  ck.meta.step = r.get<std::uint64_t>();
  ck.meta.lr = r.get_f64();
  ck.meta.seed = r.get<std::uint64_t>();
  ck.meta.config = r.get_string();
  const auto count = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedTensor t;
    t.name = r.get_string();
    const auto rank = r.get<std::uint32_t>();
    if (rank > 8) throw FormatError("read_checkpoint: tensor " + t.name + " has implausible rank");
    std::uint64_t numel = 1;
    for (std::uint32_t d = 0; d < rank; ++d) {
      const auto e = r.get<std::uint64_t>();
      if (e == 0 || e > (1ULL << 40)) throw FormatError("read_checkpoint: tensor " + t.name + " has a bad extent");
      t.shape.push_back(static_cast<std::int64_t>(e));
      numel *= e;
    }
    t.values.resize(numel);
    for (auto& v : t.values) v = r.get_f32();
    ck.tensors.push_back(std::move(t));
  }
  if (!r.at_end()) throw FormatError("read_checkpoint: trailing bytes in " + path.string());
  return ck;
}

template <typename T>
void load_parameters(ParameterSet<T>& params, const Checkpoint& ck) {
  std::vector<const NamedTensor*> sources;
  for (const auto& t : ck.tensors) {
    const Variable<T>* target = params.find(t.name);
    if (!target) throw FormatError("load_checkpoint: unknown tensor '" + t.name + "'");
    if (target->shape() != t.shape) {
      throw FormatError("load_checkpoint: tensor '" + t.name + "' has shape " + shape_str(t.shape) +
                        " but the model expects " + shape_str(target->shape()));
    }
  }
  for (const auto& e : params.entries()) {
    const NamedTensor* src = nullptr;
    for (const auto& t : ck.tensors) {
      if (t.name == e.name) src = &t;
    }
    if (!src) throw FormatError("load_checkpoint: checkpoint lacks tensor '" + e.name + "'");
    sources.push_back(src);
  }
  std::size_t i = 0;
  for (const auto& e : params.entries()) {
    Variable<T> var = e.var;
    auto dst = var.mutable_value().data();
    const auto& src = sources[i++]->values;
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] = static_cast<T>(src[k]);
  }
}

template Checkpoint make_checkpoint(const ParameterSet<float>&, CheckpointMeta);
template Checkpoint make_checkpoint(const ParameterSet<double>&, CheckpointMeta);
template void load_parameters(ParameterSet<float>&, const Checkpoint&);
template void load_parameters(ParameterSet<double>&, const Checkpoint&);

}  // namespace cdnet
