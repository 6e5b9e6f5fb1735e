#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "cdnet/optim.hpp"
#include "cdnet/wnet.hpp"

namespace cdnet {

struct GeneratorConfig {
  WNetConfig wnet;  // input_channels must equal 3 + noise_channels
  std::int64_t noise_channels = 1;

  /// 5x5 kernels, tanh output, one appended noise channel per branch.
  static GeneratorConfig make(std::int64_t input_size = 256, double base_width = 1.0,
                              std::int64_t noise_channels = 1);
  void validate() const;
};

struct DiscriminatorConfig {
  std::int64_t input_size = 256;
  std::int64_t image_channels = 3;
  int kernel_size = 5;
  std::array<std::int64_t, 4> channels = {64, 128, 256, 512};
  double base_width = 1.0;
  double leaky_slope = 0.2;
  double init_std = 0.02;

  void validate() const;
  /// Both images plus the one-channel change map.
  std::int64_t input_channels() const { return 2 * image_channels + 1; }
  std::array<std::int64_t, 4> scaled_channels() const;
  /// Length of the flattened final feature map.
  std::int64_t dense_inputs() const;
};

/// W-Net generator: (x1, x2, z) -> change map in [-1, 1]. z is concatenated
/// channelwise onto each branch input.
template <typename T>
class Generator {
 public:
  Generator(const GeneratorConfig& config, RngStream& rng);

  Variable<T> forward(Tape<T>& tape, const Variable<T>& x1, const Variable<T>& x2, const Variable<T>& z) const;

  const GeneratorConfig& config() const { return config_; }
  const WNet<T>& net() const { return net_; }
  ParameterSet<T>& parameters() { return net_.parameters(); }
  const ParameterSet<T>& parameters() const { return net_.parameters(); }
  /// Standard-normal noise shaped for a batch of `batch` inputs.
  Tensor<T> sample_noise(RngStream& rng, std::int64_t batch) const;

 private:
  GeneratorConfig config_;
  WNet<T> net_;
};

/// Four strided 5x5 convolutions with leaky ReLU, flattened into one dense unit.
template <typename T>
class Discriminator {
 public:
  Discriminator(const DiscriminatorConfig& config, RngStream& rng);

  /// Pre-sigmoid realness score, [N,1].
  Variable<T> logits(Tape<T>& tape, const Variable<T>& x1, const Variable<T>& x2, const Variable<T>& cm) const;
  /// Realness probability in (0,1), [N,1].
  Variable<T> forward(Tape<T>& tape, const Variable<T>& x1, const Variable<T>& x2, const Variable<T>& cm) const;

  const DiscriminatorConfig& config() const { return config_; }
  const std::vector<ConvLayer<T>>& layers() const { return layers_; }
  ParameterSet<T>& parameters() { return params_; }
  const ParameterSet<T>& parameters() const { return params_; }
  std::vector<LayerInfo> manifest() const;

 private:
  DiscriminatorConfig config_;
  std::vector<ConvLayer<T>> layers_;
  Variable<T> dense_weight_;
  Variable<T> dense_bias_;
  ParameterSet<T> params_;
};

/// -[log D(real) + log(1 - D(fake))], averaged over the batch, from logits.
template <typename T>
Variable<T> discriminator_loss(Tape<T>& tape, const Variable<T>& real_logits, const Variable<T>& fake_logits);

/// Non-saturating generator term -log D(fake), averaged over the batch.
template <typename T>
Variable<T> generator_adversarial_loss(Tape<T>& tape, const Variable<T>& fake_logits);

/// Discriminator objective evaluated directly on probabilities.
double discriminator_loss_from_probabilities(double p_real, double p_fake);

/// Maps a {0,1} mask to the generator's {-1,+1} range.
template <typename T>
Tensor<T> mask_to_signed(const Tensor<T>& mask01);

template <typename T>
struct GanBatch {
  Tensor<T> x1;  // [N,3,H,W]
  Tensor<T> x2;
  Tensor<T> gt;  // [N,1,H,W] with values in {-1,+1}
};

struct GanStepResult {
  double d_loss = 0.0;
  double g_loss_adv = 0.0;  // from the last generator update
  double g_loss_l1 = 0.0;
  double g_loss = 0.0;      // g_loss_adv + lambda * g_loss_l1
};

struct GanTrainerConfig {
  AdamConfig adam;
  double lambda = 100.0;
  int generator_updates_per_step = 2;
};

/// One discriminator update followed by `generator_updates_per_step` generator
/// updates per call. The opposing network is frozen during each update and a
/// fresh noise sample is drawn for every generator evaluation.
template <typename T>
class GanTrainer {
 public:
  GanTrainer(Generator<T>& generator, Discriminator<T>& discriminator, GanTrainerConfig config = {});

  /// Throws NonFiniteError (with no parameter changed by the failing update)
  /// when a loss is NaN or Inf.
  GanStepResult step(const GanBatch<T>& batch, RngStream& rng);

  std::int64_t d_updates() const { return d_updates_; }
  std::int64_t g_updates() const { return g_updates_; }
  void set_lr(double lr);
  const GanTrainerConfig& config() const { return config_; }

 private:
  Generator<T>& g_;
  Discriminator<T>& d_;
  GanTrainerConfig config_;
  Adam<T> g_opt_;
  Adam<T> d_opt_;
  std::int64_t d_updates_ = 0;
  std::int64_t g_updates_ = 0;
};

extern template class Generator<float>;
extern template class Generator<double>;
extern template class Discriminator<float>;
extern template class Discriminator<double>;
extern template class GanTrainer<float>;
extern template class GanTrainer<double>;

/// Parameter count listed for CDGAN (generator plus discriminator) in the original experiments.
inline constexpr std::int64_t kReportedCdganParameters = 123'045'378;

}  // namespace cdnet
