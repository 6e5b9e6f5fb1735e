#include "cdnet/losses.hpp"

#include <cmath>
#include <stdexcept>

#include "cdnet/errors.hpp"
#include "cdnet/ops.hpp"

namespace cdnet {

template <typename T>
Variable<T> sigmoid_cross_entropy(Tape<T>& tape, const Variable<T>& logits, const Tensor<T>& targets) {
  if (logits.shape() != targets.shape()) {
    throw ShapeError("sigmoid_cross_entropy: logits " + shape_str(logits.shape()) + " vs targets " +
                     shape_str(targets.shape()));
  }
  for (auto y : targets.data()) {
    if (y != T(0) && y != T(1)) throw std::invalid_argument("sigmoid_cross_entropy: targets must be 0 or 1");
  }
  const auto l = logits.value().data();
  const auto y = targets.data();
  double acc = 0.0;
  for (std::size_t i = 0; i < l.size(); ++i) {
    const double li = l[i];
    acc += std::max(li, 0.0) - li * y[i] + std::log1p(std::exp(-std::abs(li)));
  }
  const auto count = static_cast<T>(l.size());
  Variable<T> result(Tensor<T>(Shape{1}, static_cast<T>(acc / static_cast<double>(l.size()))),
                     logits.requires_grad(), !logits.requires_grad());
  if (logits.requires_grad()) {
    tape.record("sigmoid_cross_entropy", result, [logits, targets, result, count]() mutable {
      const T g = result.grad()[0] / count;
      const auto l = logits.value().data();
      const auto y = targets.data();
      auto dl = logits.grad_buffer().data();
      for (std::size_t i = 0; i < l.size(); ++i) dl[i] += g * (sigmoid_scalar(l[i]) - y[i]);
    });
  }
  return result;
}

template <typename T>
Variable<T> l1_loss(Tape<T>& tape, const Variable<T>& prediction, const Tensor<T>& target) {
  if (prediction.shape() != target.shape()) {
    throw ShapeError("l1_loss: prediction " + shape_str(prediction.shape()) + " vs target " +
                     shape_str(target.shape()));
  }
  const auto p = prediction.value().data();
  const auto t = target.data();
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += std::abs(static_cast<double>(p[i]) - t[i]);
  const auto count = static_cast<T>(p.size());
  Variable<T> result(Tensor<T>(Shape{1}, static_cast<T>(acc / static_cast<double>(p.size()))),
                     prediction.requires_grad(), !prediction.requires_grad());
  if (prediction.requires_grad()) {
    tape.record("l1_loss", result, [prediction, target, result, count]() mutable {
      const T g = result.grad()[0] / count;
      const auto p = prediction.value().data();
      const auto t = target.data();
      auto dp = prediction.grad_buffer().data();
      for (std::size_t i = 0; i < p.size(); ++i) {
        const T d = p[i] - t[i];
        dp[i] += d > T(0) ? g : (d < T(0) ? -g : T(0));
      }
    });
  }
  return result;
}

double naive_cross_entropy(double probability, double target) {
  return -(target * std::log(probability) + (1.0 - target) * std::log(1.0 - probability));
}

template Variable<float> sigmoid_cross_entropy(Tape<float>&, const Variable<float>&, const Tensor<float>&);
template Variable<double> sigmoid_cross_entropy(Tape<double>&, const Variable<double>&, const Tensor<double>&);
template Variable<float> l1_loss(Tape<float>&, const Variable<float>&, const Tensor<float>&);
template Variable<double> l1_loss(Tape<double>&, const Variable<double>&, const Tensor<double>&);

}  // namespace cdnet
