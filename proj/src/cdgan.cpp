#include "cdnet/cdgan.hpp"

#include <cmath>
#include <stdexcept>

#include "cdnet/errors.hpp"
#include "cdnet/losses.hpp"

namespace cdnet {

GeneratorConfig GeneratorConfig::make(std::int64_t input_size, double base_width, std::int64_t noise_channels) {
  GeneratorConfig config;
  config.noise_channels = noise_channels;
  config.wnet.input_size = input_size;
  config.wnet.input_channels = 3 + noise_channels;
  config.wnet.base_width = base_width;
  config.wnet.kernel_size = 5;
  config.wnet.output_activation = Activation::tanh();
  return config;
}

void GeneratorConfig::validate() const {
  wnet.validate();
  if (noise_channels < 0) throw std::invalid_argument("GeneratorConfig: noise_channels must be >= 0");
  if (wnet.input_channels != 3 + noise_channels) {
    throw std::invalid_argument("GeneratorConfig: branch input channels must be 3 + noise_channels");
  }
  if (wnet.output_activation.kind != ActivationKind::tanh) {
    throw std::invalid_argument("GeneratorConfig: generator output must be tanh");
  }
}

void DiscriminatorConfig::validate() const {
  if (input_size < 16 || input_size % 16 != 0) {
    throw std::invalid_argument("DiscriminatorConfig: input_size must be a positive multiple of 16");
  }
  if (image_channels < 1 || kernel_size < 1 || kernel_size % 2 == 0 || !(base_width > 0.0) || !(init_std > 0.0)) {
    throw std::invalid_argument("DiscriminatorConfig: invalid field");
  }
}

std::array<std::int64_t, 4> DiscriminatorConfig::scaled_channels() const {
  std::array<std::int64_t, 4> out{};
  for (std::size_t i = 0; i < 4; ++i) out[i] = cdnet::scaled_channels(channels[i], base_width);
  return out;
}

std::int64_t DiscriminatorConfig::dense_inputs() const {
  const std::int64_t extent = input_size / 16;
  return scaled_channels()[3] * extent * extent;
}

template <typename T>
Generator<T>::Generator(const GeneratorConfig& config, RngStream& rng)
    : config_((config.validate(), config)), net_(config.wnet, rng) {}

template <typename T>
Variable<T> Generator<T>::forward(Tape<T>& tape, const Variable<T>& x1, const Variable<T>& x2,
                                  const Variable<T>& z) const {
  if (config_.noise_channels == 0) return net_.forward(tape, x1, x2);
  if (!z.defined() || z.value().empty()) throw std::invalid_argument("generator_forward: noise input is required");
  const Shape& zs = z.shape();
  if (zs.size() != 4 || zs[1] != config_.noise_channels) {
    throw ShapeError("generator_forward: noise " + shape_str(zs) + " must have " +
                     std::to_string(config_.noise_channels) + " channels");
  }
  return net_.forward(tape, concat_channels<T>(tape, {x1, z}), concat_channels<T>(tape, {x2, z}));
}

template <typename T>
Tensor<T> Generator<T>::sample_noise(RngStream& rng, std::int64_t batch) const {
  const auto size = config_.wnet.input_size;
  return standard_normal<T>(rng, Shape{batch, std::max<std::int64_t>(config_.noise_channels, 1), size, size});
}

template <typename T>
Discriminator<T>::Discriminator(const DiscriminatorConfig& config, RngStream& rng) : config_(config) {
  config_.validate();
  const auto widths = config_.scaled_channels();
  std::int64_t in = config_.input_channels();
  std::int64_t extent = config_.input_size;
  for (std::size_t i = 0; i < 4; ++i) {
    auto layer = ConvLayer<T>::make("D-Conv" + std::to_string(i + 1), false, in, widths[i], config_.kernel_size, 2,
                                    Activation::leaky_relu(config_.leaky_slope), config_.init_std, rng);
    extent /= 2;
    layer.expected_chw = {widths[i], extent, extent};
    params_.add("discriminator." + layer.name + ".weight", layer.weight);
    params_.add("discriminator." + layer.name + ".bias", layer.bias);
    layers_.push_back(std::move(layer));
    in = widths[i];
  }
  dense_weight_ = Variable<T>(gaussian_init<T>(rng, Shape{config_.dense_inputs(), 1}, config_.init_std), true);
  dense_bias_ = Variable<T>(Tensor<T>::zeros(Shape{1}), true);
  params_.add("discriminator.dense.weight", dense_weight_);
  params_.add("discriminator.dense.bias", dense_bias_);
}

template <typename T>
Variable<T> Discriminator<T>::logits(Tape<T>& tape, const Variable<T>& x1, const Variable<T>& x2,
                                     const Variable<T>& cm) const {
  const Shape& a = x1.shape();
  const Shape& b = x2.shape();
  const Shape& c = cm.shape();
  if (a.size() != 4 || b.size() != 4 || c.size() != 4 || a[0] != b[0] || a[0] != c[0] || a[2] != b[2] ||
      a[3] != b[3] || a[2] != c[2] || a[3] != c[3]) {
    throw ShapeError("discriminator_forward: inputs " + shape_str(a) + ", " + shape_str(b) + ", " + shape_str(c) +
                     " are not spatially aligned");
  }
  if (a[1] != config_.image_channels || b[1] != config_.image_channels || c[1] != 1 ||
      a[2] != config_.input_size || a[3] != config_.input_size) {
    throw ShapeError("discriminator_forward: inputs do not match the configured size " +
                     std::to_string(config_.input_size));
  }
  Variable<T> h = concat_channels<T>(tape, {x1, x2, cm});
  for (const auto& layer : layers_) h = layer.forward(tape, h);
  return dense(tape, flatten(tape, h), dense_weight_, dense_bias_);
}

template <typename T>
Variable<T> Discriminator<T>::forward(Tape<T>& tape, const Variable<T>& x1, const Variable<T>& x2,
                                      const Variable<T>& cm) const {
  return activation(tape, Activation::sigmoid(), logits(tape, x1, x2, cm));
}

template <typename T>
std::vector<LayerInfo> Discriminator<T>::manifest() const {
  std::vector<LayerInfo> rows;
  rows.push_back({"D-Input", 0, 0, config_.input_size, config_.input_size,
                  {config_.image_channels, config_.image_channels, 1}, 0});
  for (const auto& layer : layers_) {
    rows.push_back({layer.name, layer.kernel, layer.stride, layer.expected_chw[1], layer.expected_chw[2],
                    {layer.expected_chw[0]}, layer.parameter_count()});
  }
  rows.push_back({"D-Dense", 0, 0, 1, 1, {1}, dense_weight_.value().numel() + dense_bias_.value().numel()});
  return rows;
}

template <typename T>
Variable<T> discriminator_loss(Tape<T>& tape, const Variable<T>& real_logits, const Variable<T>& fake_logits) {
  auto real = sigmoid_cross_entropy(tape, real_logits, Tensor<T>::full(real_logits.shape(), T(1)));
  auto fake = sigmoid_cross_entropy(tape, fake_logits, Tensor<T>::zeros(fake_logits.shape()));
  return add(tape, real, fake);
}

template <typename T>
Variable<T> generator_adversarial_loss(Tape<T>& tape, const Variable<T>& fake_logits) {
  return sigmoid_cross_entropy(tape, fake_logits, Tensor<T>::full(fake_logits.shape(), T(1)));
}

double discriminator_loss_from_probabilities(double p_real, double p_fake) {
  return -(std::log(p_real) + std::log1p(-p_fake));
}

template <typename T>
Tensor<T> mask_to_signed(const Tensor<T>& mask01) {
  Tensor<T> out(mask01.shape());
  for (std::int64_t i = 0; i < out.numel(); ++i) {
    if (mask01[i] != T(0) && mask01[i] != T(1)) throw std::invalid_argument("mask_to_signed: mask must be 0/1");
    out[i] = mask01[i] == T(1) ? T(1) : T(-1);
  }
  return out;
}

template <typename T>
GanTrainer<T>::GanTrainer(Generator<T>& generator, Discriminator<T>& discriminator, GanTrainerConfig config)
    : g_(generator),
      d_(discriminator),
      config_(config),
      g_opt_(generator.parameters().variables(), config.adam),
      d_opt_(discriminator.parameters().variables(), config.adam) {
  if (config_.generator_updates_per_step < 1) {
    throw std::invalid_argument("GanTrainer: generator_updates_per_step must be >= 1");
  }
  if (!(config_.lambda >= 0.0)) throw std::invalid_argument("GanTrainer: lambda must be >= 0");
}

template <typename T>
void GanTrainer<T>::set_lr(double lr) {
  g_opt_.set_lr(lr);
  d_opt_.set_lr(lr);
}

namespace {

template <typename T>
void require_finite(double value, const char* what, ParameterSet<T>& a, ParameterSet<T>& b) {
  if (std::isfinite(value)) return;
  a.zero_grad();
  b.zero_grad();
  a.set_trainable(true);
  b.set_trainable(true);
  throw NonFiniteError(std::string("gan_step: non-finite ") + what + ", step aborted");
}

}  // namespace

template <typename T>
GanStepResult GanTrainer<T>::step(const GanBatch<T>& batch, RngStream& rng) {
  const Variable<T> x1(batch.x1);
  const Variable<T> x2(batch.x2);
  const std::int64_t n = batch.x1.dim(0);
  GanStepResult result;
  auto& gp = g_.parameters();
  auto& dp = d_.parameters();

  {
    gp.set_trainable(false);
    dp.set_trainable(true);
    Tape<T> tape;
    const Variable<T> z(g_.sample_noise(rng, n));
    const Variable<T> fake(g_.forward(tape, x1, x2, z).value());
    auto real_logits = d_.logits(tape, x1, x2, Variable<T>(batch.gt));
    auto fake_logits = d_.logits(tape, x1, x2, fake);
    auto loss = discriminator_loss(tape, real_logits, fake_logits);
    result.d_loss = static_cast<double>(loss.value()[0]);
    require_finite(result.d_loss, "discriminator loss", gp, dp);
    tape.backward(loss);
    d_opt_.step();
    d_opt_.zero_grad();
    ++d_updates_;
  }

  for (int k = 0; k < config_.generator_updates_per_step; ++k) {
    gp.set_trainable(true);
    dp.set_trainable(false);
    Tape<T> tape;
    const Variable<T> z(g_.sample_noise(rng, n));
    auto fake = g_.forward(tape, x1, x2, z);
    auto fake_logits = d_.logits(tape, x1, x2, fake);
    auto adv = generator_adversarial_loss(tape, fake_logits);
    auto l1 = l1_loss(tape, fake, batch.gt);
    auto loss = add(tape, adv, scale(tape, l1, static_cast<T>(config_.lambda)));
    result.g_loss_adv = static_cast<double>(adv.value()[0]);
    result.g_loss_l1 = static_cast<double>(l1.value()[0]);
    result.g_loss = static_cast<double>(loss.value()[0]);
    require_finite(result.g_loss, "generator loss", gp, dp);
    tape.backward(loss);
    g_opt_.step();
    g_opt_.zero_grad();
    ++g_updates_;
  }
  dp.set_trainable(true);
  return result;
}

#define CDNET_INSTANTIATE_GAN(T)                                                                         \
  template class Generator<T>;                                                                           \
  template class Discriminator<T>;                                                                       \
  template class GanTrainer<T>;                                                                          \
  template Variable<T> discriminator_loss(Tape<T>&, const Variable<T>&, const Variable<T>&);             \
  template Variable<T> generator_adversarial_loss(Tape<T>&, const Variable<T>&);                         \
  template Tensor<T> mask_to_signed(const Tensor<T>&);

CDNET_INSTANTIATE_GAN(float)
CDNET_INSTANTIATE_GAN(double)

}  // namespace cdnet
