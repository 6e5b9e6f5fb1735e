#include "cdnet/tensor.hpp"

#include <sstream>

#include "cdnet/errors.hpp"

namespace cdnet {

std::int64_t shape_numel(const Shape& shape) {
  std::int64_t n = 1;
  for (auto e : shape) {
    if (e < 1) throw ShapeError("tensor extents must be >= 1, got " + shape_str(shape));
    n *= e;
  }
  return n;
}

std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

template <typename T>
Tensor<T>::Tensor(Shape shape, T fill)
    : shape_(std::move(shape)), data_(static_cast<std::size_t>(shape_numel(shape_)), fill) {}

template <typename T>
Tensor<T>::Tensor(Shape shape, const std::vector<T>& data)
    : Tensor(std::move(shape), AlignedVector<T>(data.begin(), data.end())) {}

template <typename T>
Tensor<T>::Tensor(Shape shape, AlignedVector<T> data) : shape_(std::move(shape)), data_(std::move(data)) {
  if (static_cast<std::int64_t>(data_.size()) != shape_numel(shape_)) {
    throw ShapeError("tensor data length " + std::to_string(data_.size()) + " does not match shape " +
                     shape_str(shape_));
  }
}

template <typename T>
T& Tensor<T>::at(std::int64_t n, std::int64_t c, std::int64_t h, std::int64_t w) {
  return data_[static_cast<std::size_t>(((n * shape_[1] + c) * shape_[2] + h) * shape_[3] + w)];
}

template <typename T>
const T& Tensor<T>::at(std::int64_t n, std::int64_t c, std::int64_t h, std::int64_t w) const {
  return data_[static_cast<std::size_t>(((n * shape_[1] + c) * shape_[2] + h) * shape_[3] + w)];
}

template <typename T>
Tensor<T> Tensor<T>::reshaped(Shape shape) const {
  if (shape_numel(shape) != numel()) {
    throw ShapeError("cannot reshape " + shape_str(shape_) + " to " + shape_str(shape));
  }
  return Tensor(std::move(shape), data_);
}

template <typename T>
void Tensor<T>::fill(T value) {
  std::fill(data_.begin(), data_.end(), value);
}

template <typename T>
void Tensor<T>::add_(const Tensor& other) {
  if (other.shape_ != shape_) {
    throw ShapeError("add_: shape " + shape_str(other.shape_) + " vs " + shape_str(shape_));
  }
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
}

template <typename T>
void require_rank4(const Tensor<T>& t, const char* what) {
  if (t.rank() != 4) {
    throw ShapeError(std::string(what) + ": expected a rank-4 tensor, got " + shape_str(t.shape()));
  }
}

template class Tensor<float>;
template class Tensor<double>;
template void require_rank4(const Tensor<float>&, const char*);
template void require_rank4(const Tensor<double>&, const char*);

}  // namespace cdnet
