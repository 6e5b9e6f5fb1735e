#pragma once

#include "cdnet/autograd.hpp"

namespace cdnet {

/// Mean binary cross-entropy between sigmoid(logits) and binary targets,
/// evaluated as max(l,0) - l*y + log(1 + exp(-|l|)). Throws std::invalid_argument
/// when a target is neither 0 nor 1.
template <typename T>
Variable<T> sigmoid_cross_entropy(Tape<T>& tape, const Variable<T>& logits, const Tensor<T>& targets);

/// Mean absolute difference |prediction - target|.
template <typename T>
Variable<T> l1_loss(Tape<T>& tape, const Variable<T>& prediction, const Tensor<T>& target);

/// Textbook two-term cross-entropy on probabilities. Reference only: overflows
/// for large |logit|.
double naive_cross_entropy(double probability, double target);

}  // namespace cdnet
