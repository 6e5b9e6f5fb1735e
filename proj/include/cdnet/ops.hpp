#pragma once

#include <cstdint>
#include <vector>

#include "cdnet/autograd.hpp"

namespace cdnet {

enum class ActivationKind { identity, relu, leaky_relu, sigmoid, tanh };

struct Activation {
  ActivationKind kind = ActivationKind::identity;
  double alpha = 0.2;  // negative slope, leaky_relu only

  static Activation identity() { return {ActivationKind::identity, 0.0}; }
  static Activation relu() { return {ActivationKind::relu, 0.0}; }
  static Activation leaky_relu(double alpha = 0.2) { return {ActivationKind::leaky_relu, alpha}; }
  static Activation sigmoid() { return {ActivationKind::sigmoid, 0.0}; }
  static Activation tanh() { return {ActivationKind::tanh, 0.0}; }
};

const char* activation_name(ActivationKind kind);

/// Output extent of a cross-correlation along one axis.
std::int64_t conv_out_extent(std::int64_t in, std::int64_t kernel, std::int64_t stride, std::int64_t padding);
/// Output extent of a transposed convolution along one axis.
std::int64_t conv_transpose_out_extent(std::int64_t in, std::int64_t kernel, std::int64_t stride,
                                       std::int64_t padding, std::int64_t output_padding);

// All operations below record themselves on `tape` when any input requires a
// gradient; otherwise they only evaluate.

/// Cross-correlation. x: [N,Cin,H,W], weight: [Cout,Cin,k,k], bias: [Cout].
template <typename T>
Variable<T> conv2d(Tape<T>& tape, const Variable<T>& x, const Variable<T>& weight, const Variable<T>& bias,
                   int stride, int padding);

/// Adjoint of conv2d with respect to its input. x: [N,Cin,H,W], weight: [Cin,Cout,k,k].
template <typename T>
Variable<T> conv_transpose2d(Tape<T>& tape, const Variable<T>& x, const Variable<T>& weight,
                             const Variable<T>& bias, int stride, int padding, int output_padding);

template <typename T>
Variable<T> concat_channels(Tape<T>& tape, const std::vector<Variable<T>>& parts);

template <typename T>
Variable<T> activation(Tape<T>& tape, Activation act, const Variable<T>& x);

/// x: [N,F], weight: [F,M], bias: [M] -> [N,M].
template <typename T>
Variable<T> dense(Tape<T>& tape, const Variable<T>& x, const Variable<T>& weight, const Variable<T>& bias);

/// [N, ...] -> [N, prod(...)].
template <typename T>
Variable<T> flatten(Tape<T>& tape, const Variable<T>& x);

template <typename T>
Variable<T> add(Tape<T>& tape, const Variable<T>& a, const Variable<T>& b);
template <typename T>
Variable<T> mul(Tape<T>& tape, const Variable<T>& a, const Variable<T>& b);
template <typename T>
Variable<T> scale(Tape<T>& tape, const Variable<T>& a, T factor);
template <typename T>
Variable<T> sum(Tape<T>& tape, const Variable<T>& a);
template <typename T>
Variable<T> mean(Tape<T>& tape, const Variable<T>& a);

/// Splits a [N,C,H,W] tensor into consecutive channel blocks of the given sizes.
template <typename T>
std::vector<Tensor<T>> split_channels(const Tensor<T>& x, const std::vector<std::int64_t>& sizes);

template <typename T>
T sigmoid_scalar(T x);

}  // namespace cdnet
