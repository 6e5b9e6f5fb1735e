#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "cdnet/tensor.hpp"

namespace cdnet {

/// Handle to a value that may take part in differentiation. Copies share the
/// underlying storage, so a parameter held by a layer and by an optimizer is the
/// same object.
template <typename T>
class Variable {
 public:
  Variable() = default;
  explicit Variable(Tensor<T> value, bool requires_grad = false, bool leaf = true);

  bool defined() const { return node_ != nullptr; }
  const Tensor<T>& value() const { return node_->value; }
  /// Only for optimizer updates and checkpoint loading, never while recorded on a tape.
  Tensor<T>& mutable_value() { return node_->value; }
  const Shape& shape() const { return node_->value.shape(); }

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool on) { node_->requires_grad = on; }
  bool is_leaf() const { return node_->leaf; }

  bool has_grad() const { return !node_->grad.empty(); }
  const Tensor<T>& grad() const { return node_->grad; }
  /// Gradient storage, allocated as zeros on first use.
  Tensor<T>& grad_buffer() const;
  void zero_grad() const { node_->grad = Tensor<T>(); }

  bool same_node(const Variable& other) const { return node_ == other.node_; }
  const void* id() const { return node_.get(); }

 private:
  struct Node {
    Tensor<T> value;
    Tensor<T> grad;
    bool requires_grad = false;
    bool leaf = true;
  };
  std::shared_ptr<Node> node_;
};

/// Ordered record of the differentiable operations of one forward pass.
/// `backward` replays the recorded closures in exact reverse order.
template <typename T>
class Tape {
 public:
  using BackwardFn = std::function<void()>;

  Tape() = default;
  /// A tape that evaluates without recording, for inference.
  static Tape inference() {
    Tape t;
    t.recording_ = false;
    return t;
  }
  bool recording() const { return recording_; }

  /// Records `fn`, which reads output.grad() and accumulates into its inputs.
  void record(std::string op, Variable<T> output, BackwardFn fn);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::string& op_name(std::size_t i) const { return entries_.at(i).op; }
  void clear() { entries_.clear(); }

  /// Seeds d(loss)/d(loss) = 1 and propagates to every leaf that requires grad.
  /// Intermediate gradients are released once consumed; the tape is cleared.
  void backward(Variable<T>& loss);

 private:
  struct Entry {
    std::string op;
    Variable<T> output;
    BackwardFn fn;
  };
  std::vector<Entry> entries_;
  bool recording_ = true;
};

extern template class Variable<float>;
extern template class Variable<double>;
extern template class Tape<float>;
extern template class Tape<double>;

}  // namespace cdnet
