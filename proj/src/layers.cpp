#include "cdnet/layers.hpp"

#include "cdnet/errors.hpp"

namespace cdnet {

int same_padding(int kernel) { return kernel / 2; }

template <typename T>
ConvLayer<T> ConvLayer<T>::make(std::string name, bool transposed, std::int64_t in_ch, std::int64_t out_ch,
                                int kernel, int stride, Activation act, double init_std, RngStream& rng) {
  ConvLayer layer;
  layer.name = std::move(name);
  layer.transposed = transposed;
  layer.kernel = kernel;
  layer.stride = stride;
  layer.padding = same_padding(kernel);
  layer.output_padding = (transposed && stride > 1) ? 1 : 0;
  layer.act = act;
  const Shape wshape = transposed ? Shape{in_ch, out_ch, kernel, kernel} : Shape{out_ch, in_ch, kernel, kernel};
  layer.weight = Variable<T>(gaussian_init<T>(rng, wshape, init_std), true);
  layer.bias = Variable<T>(Tensor<T>::zeros(Shape{out_ch}), true);
  return layer;
}

template <typename T>
Variable<T> ConvLayer<T>::forward(Tape<T>& tape, const Variable<T>& x) const {
  Variable<T> y = transposed ? conv_transpose2d(tape, x, weight, bias, stride, padding, output_padding)
                             : conv2d(tape, x, weight, bias, stride, padding);
  if (!expected_chw.empty()) {
    const Shape& s = y.shape();
    if (s[1] != expected_chw[0] || s[2] != expected_chw[1] || s[3] != expected_chw[2]) {
      throw ShapeError(name + ": produced " + shape_str(s) + ", manifest expects " + shape_str(expected_chw));
    }
  }
  return activation(tape, act, y);
}

template <typename T>
void ParameterSet<T>::add(std::string name, Variable<T> var) {
  for (const auto& e : entries_) {
    if (e.var.same_node(var)) return;
  }
  entries_.push_back({std::move(name), std::move(var)});
}

template <typename T>
void ParameterSet<T>::append(const ParameterSet& other, const std::string& prefix) {
  for (const auto& e : other.entries_) add(prefix + e.name, e.var);
}

template <typename T>
std::vector<Variable<T>> ParameterSet<T>::variables() const {
  std::vector<Variable<T>> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.var);
  return out;
}

template <typename T>
const Variable<T>* ParameterSet<T>::find(const std::string& name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return &e.var;
  }
  return nullptr;
}

template <typename T>
std::int64_t ParameterSet<T>::element_count() const {
  std::int64_t n = 0;
  for (const auto& e : entries_) n += e.var.value().numel();
  return n;
}

template <typename T>
void ParameterSet<T>::set_trainable(bool on) {
  for (auto& e : entries_) e.var.set_requires_grad(on);
}

template <typename T>
void ParameterSet<T>::zero_grad() {
  for (auto& e : entries_) e.var.zero_grad();
}

template struct ConvLayer<float>;
template struct ConvLayer<double>;
template class ParameterSet<float>;
template class ParameterSet<double>;

}  // namespace cdnet
