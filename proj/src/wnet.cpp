#include "cdnet/wnet.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cdnet/errors.hpp"

namespace cdnet {

namespace {

constexpr std::array<std::int64_t, 8> kEncoderLadder = {64, 128, 256, 512, 512, 512, 512, 512};
constexpr std::array<std::int64_t, 8> kDecoderLadder = {512, 512, 512, 512, 256, 128, 64, 1};

// Decoder stride-2 layer index -> encoder layer whose outputs are concatenated after it.
constexpr std::int64_t skip_source(std::size_t decoder_index) {
  switch (decoder_index) {
    case 1: return 5;
    case 3: return 3;
    case 5: return 1;
    default: return -1;
  }
}

int stride_of(std::size_t index) { return index % 2 == 1 ? 2 : 1; }

std::int64_t encoder_extent(std::int64_t input, std::size_t index) { return input >> ((index + 1) / 2); }
std::int64_t decoder_extent(std::int64_t input, std::size_t index) { return (input / 16) << ((index + 1) / 2); }

std::int64_t layer_params(std::int64_t in, std::int64_t out, int k) { return out * in * k * k + out; }

}  // namespace

void WNetConfig::validate() const {
  if (input_size < 16 || input_size % 16 != 0) {
    throw std::invalid_argument("WNetConfig: input_size must be a positive multiple of 16, got " +
                                std::to_string(input_size));
  }
  if (input_channels < 1) throw std::invalid_argument("WNetConfig: input_channels must be >= 1");
  if (!(base_width > 0.0) || !std::isfinite(base_width)) {
    throw std::invalid_argument("WNetConfig: base_width must be positive");
  }
  if (kernel_size < 1 || kernel_size % 2 == 0) throw std::invalid_argument("WNetConfig: kernel_size must be odd");
  if (!(init_std > 0.0)) throw std::invalid_argument("WNetConfig: init_std must be positive");
}

std::int64_t LayerInfo::channels() const {
  std::int64_t c = 0;
  for (auto p : channel_parts) c += p;
  return c;
}

std::string LayerInfo::out_shape() const {
  std::ostringstream os;
  os << height << 'x' << width << 'x';
  if (channel_parts.size() == 1) {
    os << channel_parts.front();
  } else {
    os << '(';
    for (std::size_t i = 0; i < channel_parts.size(); ++i) os << (i ? "+" : "") << channel_parts[i];
    os << ')';
  }
  return os.str();
}

std::int64_t scaled_channels(std::int64_t full, double base_width) {
  return std::max<std::int64_t>(1, std::llround(static_cast<double>(full) * base_width));
}

WNetChannelPlan WNetChannelPlan::from(const WNetConfig& config) {
  WNetChannelPlan plan{};
  for (std::size_t i = 0; i < 8; ++i) {
    plan.encoder[i] = scaled_channels(kEncoderLadder[i], config.base_width);
    plan.decoder_out[i] = scaled_channels(kDecoderLadder[i], config.base_width);
  }
  plan.decoder_out[7] = 1;
  plan.decoder_in[0] = 2 * plan.encoder[7];
  for (std::size_t j = 1; j < 8; ++j) {
    plan.decoder_in[j] = plan.decoder_out[j - 1];
    const auto skip = skip_source(j - 1);
    if (skip >= 0) plan.decoder_in[j] += 2 * plan.encoder[static_cast<std::size_t>(skip)];
  }
  return plan;
}

std::vector<LayerInfo> wnet_manifest(const WNetConfig& config) {
  config.validate();
  const auto plan = WNetChannelPlan::from(config);
  const int k = config.kernel_size;
  const std::int64_t branches = config.share_branch_weights ? 1 : 2;
  std::vector<LayerInfo> rows;
  rows.push_back({"Input", 0, 0, config.input_size, config.input_size, {config.input_channels}, 0});
  std::int64_t in = config.input_channels;
  for (std::size_t i = 0; i < 8; ++i) {
    LayerInfo row;
    row.name = "Conv1-" + std::to_string(i + 1) + ",Conv2-" + std::to_string(i + 1);
    row.kernel = k;
    row.stride = stride_of(i);
    row.height = row.width = encoder_extent(config.input_size, i);
    row.channel_parts = {plan.encoder[i]};
    if (i == 7) row.channel_parts.push_back(plan.encoder[i]);
    row.param_count = branches * layer_params(in, plan.encoder[i], k);
    rows.push_back(row);
    in = plan.encoder[i];
  }
  for (std::size_t j = 0; j < 8; ++j) {
    LayerInfo row;
    row.name = "DeConv-" + std::to_string(j + 1);
    row.kernel = k;
    row.stride = stride_of(j);
    row.height = row.width = decoder_extent(config.input_size, j);
    row.channel_parts = {plan.decoder_out[j]};
    if (const auto skip = skip_source(j); skip >= 0) {
      row.channel_parts.push_back(plan.encoder[static_cast<std::size_t>(skip)]);
      row.channel_parts.push_back(plan.encoder[static_cast<std::size_t>(skip)]);
    }
    row.param_count = layer_params(plan.decoder_in[j], plan.decoder_out[j], k);
    rows.push_back(row);
  }
  return rows;
}

template <typename T>
WNet<T>::WNet(const WNetConfig& config, RngStream& rng) : config_(config) {
  config_.validate();
  const auto plan = WNetChannelPlan::from(config_);
  const int k = config_.kernel_size;
  const int branch_count = config_.share_branch_weights ? 1 : 2;
  for (int b = 0; b < branch_count; ++b) {
    std::int64_t in = config_.input_channels;
    for (std::size_t i = 0; i < 8; ++i) {
      auto layer = ConvLayer<T>::make("Conv" + std::to_string(b + 1) + "-" + std::to_string(i + 1), false, in,
                                      plan.encoder[i], k, stride_of(i), Activation::relu(), config_.init_std, rng);
      const auto extent = encoder_extent(config_.input_size, i);
      layer.expected_chw = {plan.encoder[i], extent, extent};
      branches_[static_cast<std::size_t>(b)].push_back(std::move(layer));
      in = plan.encoder[i];
    }
  }
  if (config_.share_branch_weights) branches_[1] = branches_[0];
  for (std::size_t j = 0; j < 8; ++j) {
    const Activation act = j == 7 ? config_.output_activation : Activation::relu();
    auto layer = ConvLayer<T>::make("DeConv-" + std::to_string(j + 1), true, plan.decoder_in[j],
                                    plan.decoder_out[j], k, stride_of(j), act, config_.init_std, rng);
    const auto extent = decoder_extent(config_.input_size, j);
    layer.expected_chw = {plan.decoder_out[j], extent, extent};
    decoder_.push_back(std::move(layer));
  }

  for (int b = 0; b < 2; ++b) {
    for (const auto& layer : branches_[static_cast<std::size_t>(b)]) {
      const std::string prefix = "branch" + std::to_string(b + 1) + "." + layer.name + ".";
      params_.add(prefix + "weight", layer.weight);
      params_.add(prefix + "bias", layer.bias);
    }
  }
  for (const auto& layer : decoder_) {
    params_.add("decoder." + layer.name + ".weight", layer.weight);
    params_.add("decoder." + layer.name + ".bias", layer.bias);
  }
  manifest_ = wnet_manifest(config_);
}

template <typename T>
Variable<T> WNet<T>::forward(Tape<T>& tape, const Variable<T>& x1, const Variable<T>& x2) const {
  const Shape expected{x1.shape().empty() ? 0 : x1.shape()[0], config_.input_channels, config_.input_size,
                       config_.input_size};
  if (x1.shape() != x2.shape()) {
    throw ShapeError("wnet_forward: inputs differ: " + shape_str(x1.shape()) + " vs " + shape_str(x2.shape()));
  }
  if (x1.shape() != expected) {
    throw ShapeError("wnet_forward: input " + shape_str(x1.shape()) + " does not match configured " +
                     shape_str(expected));
  }
  std::array<std::array<Variable<T>, 8>, 2> features;
  const std::array<const Variable<T>*, 2> inputs = {&x1, &x2};
  for (std::size_t b = 0; b < 2; ++b) {
    Variable<T> h = *inputs[b];
    for (std::size_t i = 0; i < 8; ++i) {
      h = branches_[b][i].forward(tape, h);
      features[b][i] = h;
    }
  }
  Variable<T> d = concat_channels<T>(tape, {features[0][7], features[1][7]});
  for (std::size_t j = 0; j < 8; ++j) {
    d = decoder_[j].forward(tape, d);
    if (const auto skip = skip_source(j); skip >= 0) {
      const auto s = static_cast<std::size_t>(skip);
      d = concat_channels<T>(tape, {d, features[0][s], features[1][s]});
    }
  }
  return d;
}

template <typename T>
std::int64_t WNet<T>::closed_form_parameter_count(const WNetConfig& config) {
  config.validate();
  const auto plan = WNetChannelPlan::from(config);
  const int k = config.kernel_size;
  std::int64_t encoder = 0;
  std::int64_t in = config.input_channels;
  for (std::size_t i = 0; i < 8; ++i) {
    encoder += layer_params(in, plan.encoder[i], k);
    in = plan.encoder[i];
  }
  std::int64_t decoder = 0;
  for (std::size_t j = 0; j < 8; ++j) decoder += layer_params(plan.decoder_in[j], plan.decoder_out[j], k);
  return (config.share_branch_weights ? 1 : 2) * encoder + decoder;
}

template <typename T>
std::pair<std::int64_t, std::int64_t> WNet<T>::influence_range(std::int64_t pixel) const {
  using Range = std::pair<std::int64_t, std::int64_t>;
  auto conv_range = [](Range r, const ConvLayer<T>& l, std::int64_t out_extent) {
    // o*s - p + kk in [lo, hi] for some kk in [0, k)
    const std::int64_t s = l.stride, p = l.padding, k = l.kernel;
    const std::int64_t num = r.first + p - (k - 1);
    const std::int64_t lo = num <= 0 ? 0 : (num + s - 1) / s;
    const std::int64_t hi = std::min(out_extent - 1, (r.second + p) / s);
    return Range{lo, hi};
  };
  auto deconv_range = [](Range r, const ConvLayer<T>& l, std::int64_t out_extent) {
    const std::int64_t s = l.stride, p = l.padding, k = l.kernel;
    return Range{std::max<std::int64_t>(0, r.first * s - p), std::min(out_extent - 1, r.second * s - p + k - 1)};
  };
  auto hull = [](Range a, Range b) { return Range{std::min(a.first, b.first), std::max(a.second, b.second)}; };

  std::array<Range, 8> enc{};
  Range r{pixel, pixel};
  for (std::size_t i = 0; i < 8; ++i) {
    r = conv_range(r, branches_[0][i], encoder_extent(config_.input_size, i));
    enc[i] = r;
  }
  Range d = enc[7];
  for (std::size_t j = 0; j < 8; ++j) {
    d = deconv_range(d, decoder_[j], decoder_extent(config_.input_size, j));
    if (const auto skip = skip_source(j); skip >= 0) d = hull(d, enc[static_cast<std::size_t>(skip)]);
  }
  return d;
}

template class WNet<float>;
template class WNet<double>;

}  // namespace cdnet
