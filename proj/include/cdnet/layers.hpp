#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cdnet/ops.hpp"
#include "cdnet/rng.hpp"

namespace cdnet {

/// One convolution or transposed convolution followed by an activation.
template <typename T>
struct ConvLayer {
  std::string name;
  bool transposed = false;
  int kernel = 3;
  int stride = 1;
  int padding = 1;
  int output_padding = 0;
  Activation act;
  Variable<T> weight;  // conv: [Cout,Cin,k,k]; transposed: [Cin,Cout,k,k]
  Variable<T> bias;    // [Cout]
  Shape expected_chw;  // output channels, height, width

  static ConvLayer make(std::string name, bool transposed, std::int64_t in_ch, std::int64_t out_ch, int kernel,
                        int stride, Activation act, double init_std, RngStream& rng);

  std::int64_t in_channels() const { return weight.shape()[transposed ? 0 : 1]; }
  std::int64_t out_channels() const { return weight.shape()[transposed ? 1 : 0]; }
  std::int64_t parameter_count() const { return weight.value().numel() + bias.value().numel(); }

  /// Evaluates the layer; throws ShapeError if the result differs from expected_chw.
  Variable<T> forward(Tape<T>& tape, const Variable<T>& x) const;
};

template <typename T>
struct NamedParameter {
  std::string name;
  Variable<T> var;
};

/// Ordered, de-duplicated list of trainable tensors.
template <typename T>
class ParameterSet {
 public:
  /// Adds `var` unless the same storage is already registered.
  void add(std::string name, Variable<T> var);
  void append(const ParameterSet& other, const std::string& prefix = "");

  const std::vector<NamedParameter<T>>& entries() const { return entries_; }
  std::vector<Variable<T>> variables() const;
  const Variable<T>* find(const std::string& name) const;
  std::size_t size() const { return entries_.size(); }
  std::int64_t element_count() const;

  void set_trainable(bool on);
  void zero_grad();

 private:
  std::vector<NamedParameter<T>> entries_;
};

/// Padding used for every layer: k/2, which preserves size at stride 1 and
/// halves/doubles even extents at stride 2 (with output_padding 1 for upsampling).
int same_padding(int kernel);

}  // namespace cdnet
