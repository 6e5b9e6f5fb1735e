#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cdnet/layers.hpp"

namespace cdnet {

struct WNetConfig {
  std::int64_t input_size = 256;
  std::int64_t input_channels = 3;
  double base_width = 1.0;  // multiplier on the 64..512 channel ladder
  int kernel_size = 3;
  bool share_branch_weights = false;
  Activation output_activation = Activation::identity();
  double init_std = 0.02;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

/// One row of the layer table. Encoder rows describe both branches at once.
struct LayerInfo {
  std::string name;
  int kernel = 0;  // 0 for the input row
  int stride = 0;
  std::int64_t height = 0;
  std::int64_t width = 0;
  std::vector<std::int64_t> channel_parts;  // more than one entry where outputs are concatenated
  std::int64_t param_count = 0;

  std::int64_t channels() const;
  /// "256x256x64" or "16x16x(512+512)".
  std::string out_shape() const;
};

/// Channel counts derived from a config: the Table-style ladder scaled by base_width.
struct WNetChannelPlan {
  std::array<std::int64_t, 8> encoder;
  std::array<std::int64_t, 8> decoder_in;
  std::array<std::int64_t, 8> decoder_out;

  static WNetChannelPlan from(const WNetConfig& config);
};

std::int64_t scaled_channels(std::int64_t full, double base_width);

/// Dual-branch encoder with a shared decoder. Each branch is eight convolutions
/// alternating stride 1 and 2; the decoder is eight transposed convolutions
/// alternating stride 1 and 2. The two bottleneck outputs are concatenated and the
/// stride-2 outputs of encoder blocks 3, 2, 1 of both branches are concatenated
/// onto the decoder's stride-2 outputs at matching resolution.
template <typename T>
class WNet {
 public:
  WNet(const WNetConfig& config, RngStream& rng);

  const WNetConfig& config() const { return config_; }

  /// Returns [N,1,H,W] logits (or the configured output activation applied to them).
  Variable<T> forward(Tape<T>& tape, const Variable<T>& x1, const Variable<T>& x2) const;

  const std::vector<LayerInfo>& manifest() const { return manifest_; }
  const ParameterSet<T>& parameters() const { return params_; }
  ParameterSet<T>& parameters() { return params_; }

  const std::vector<ConvLayer<T>>& branch(int index) const { return branches_.at(static_cast<std::size_t>(index)); }
  const std::vector<ConvLayer<T>>& decoder() const { return decoder_; }

  /// Elements over the distinct parameter tensors actually allocated.
  std::int64_t parameter_count() const { return params_.element_count(); }
  /// sum over layers of Cout*Cin*k^2 + Cout, computed from the channel plan alone.
  static std::int64_t closed_form_parameter_count(const WNetConfig& config);

  /// Output index range [first, last] along one axis that can depend on input
  /// index `pixel` along that axis.
  std::pair<std::int64_t, std::int64_t> influence_range(std::int64_t pixel) const;

 private:
  WNetConfig config_;
  std::array<std::vector<ConvLayer<T>>, 2> branches_;
  std::vector<ConvLayer<T>> decoder_;
  ParameterSet<T> params_;
  std::vector<LayerInfo> manifest_;
};

extern template class WNet<float>;
extern template class WNet<double>;

/// Manifest rows for a config without allocating any weights.
std::vector<LayerInfo> wnet_manifest(const WNetConfig& config);

/// Parameter count listed for W-Net in the original experiments.
inline constexpr std::int64_t kReportedWNetParameters = 42'570'625;

}  // namespace cdnet
