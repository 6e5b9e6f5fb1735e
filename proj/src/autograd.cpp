#include "cdnet/autograd.hpp"

#include <stdexcept>

#include "cdnet/errors.hpp"

namespace cdnet {

template <typename T>
Variable<T>::Variable(Tensor<T> value, bool requires_grad, bool leaf) : node_(std::make_shared<Node>()) {
  node_->value = std::move(value);
  node_->requires_grad = requires_grad;
  node_->leaf = leaf;
}

template <typename T>
Tensor<T>& Variable<T>::grad_buffer() const {
  if (node_->grad.empty()) node_->grad = Tensor<T>::zeros(node_->value.shape());
  return node_->grad;
}

template <typename T>
void Tape<T>::record(std::string op, Variable<T> output, BackwardFn fn) {
  if (!recording_) return;
  entries_.push_back(Entry{std::move(op), std::move(output), std::move(fn)});
}

template <typename T>
void Tape<T>::backward(Variable<T>& loss) {
  if (loss.value().numel() != 1) {
    throw ShapeError("backward: loss must be a scalar, got " + shape_str(loss.shape()));
  }
  if (entries_.empty()) throw std::logic_error("backward: tape is empty");
  if (!loss.requires_grad()) throw std::logic_error("backward: loss does not depend on any parameter");
  loss.grad_buffer().fill(T(1));
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->output.has_grad()) it->fn();
    if (!it->output.is_leaf()) it->output.zero_grad();
  }
  entries_.clear();
}

template class Variable<float>;
template class Variable<double>;
template class Tape<float>;
template class Tape<double>;

}  // namespace cdnet
