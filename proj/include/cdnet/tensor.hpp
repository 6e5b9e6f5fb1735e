#pragma once

#include <cstddef>
#include <cstdint>
#include <new>
#include <span>
#include <string>
#include <vector>

namespace cdnet {

using Shape = std::vector<std::int64_t>;

/// Allocator returning 64-byte aligned blocks. Eigen kernels pick their
/// vectorization path from pointer alignment, so fixing it keeps floating-point
/// summation order, and therefore results, identical from run to run.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlignment{64};
  AlignedAllocator() = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}
  T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), kAlignment)); }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, kAlignment); }
  template <typename U>
  bool operator==(const AlignedAllocator<U>&) const noexcept {
    return true;
  }
};

template <typename T>
using AlignedVector = std::vector<T, AlignedAllocator<T>>;

std::int64_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

/// Dense row-major array. 4-D tensors use N x C x H x W.
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;
  explicit Tensor(Shape shape, T fill = T(0));
  Tensor(Shape shape, const std::vector<T>& data);
  Tensor(Shape shape, AlignedVector<T> data);

  static Tensor zeros(Shape shape) { return Tensor(std::move(shape)); }
  static Tensor full(Shape shape, T value) { return Tensor(std::move(shape), value); }

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::int64_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::int64_t numel() const { return static_cast<std::int64_t>(data_.size()); }
  bool empty() const { return data_.empty(); }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }
  const AlignedVector<T>& values() const { return data_; }

  T& operator[](std::int64_t i) { return data_[static_cast<std::size_t>(i)]; }
  const T& operator[](std::int64_t i) const { return data_[static_cast<std::size_t>(i)]; }

  T& at(std::int64_t n, std::int64_t c, std::int64_t h, std::int64_t w);
  const T& at(std::int64_t n, std::int64_t c, std::int64_t h, std::int64_t w) const;

  /// Same data under a new shape with equal element count.
  Tensor reshaped(Shape shape) const;

  template <typename U>
  Tensor<U> cast() const {
    AlignedVector<U> out(data_.begin(), data_.end());
    return Tensor<U>(shape_, std::move(out));
  }

  void fill(T value);
  void add_(const Tensor& other);

  bool operator==(const Tensor& other) const = default;

 private:
  Shape shape_;
  AlignedVector<T> data_;
};

extern template class Tensor<float>;
extern template class Tensor<double>;

/// Throws ShapeError unless `t` is rank 4.
template <typename T>
void require_rank4(const Tensor<T>& t, const char* what);

}  // namespace cdnet
