#include "cdnet/detector.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "cdnet/errors.hpp"
#include "cdnet/losses.hpp"

namespace cdnet {

ModelKind parse_model_kind(const std::string& name) {
  if (name == "wnet") return ModelKind::wnet;
  if (name == "cdgan") return ModelKind::cdgan;
  throw std::invalid_argument("unknown model kind '" + name + "' (expected wnet or cdgan)");
}

const char* model_kind_name(ModelKind kind) { return kind == ModelKind::wnet ? "wnet" : "cdgan"; }

std::string ModelSpec::to_json() const {
  return nlohmann::json{{"model", model_kind_name(kind)},
                        {"input_size", input_size},
                        {"base_width", base_width},
                        {"noise_channels", noise_channels},
                        {"init_std", init_std},
                        {"seed", seed}}
      .dump();
}

ModelSpec ModelSpec::from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    ModelSpec s;
    s.kind = parse_model_kind(j.at("model").get<std::string>());
    s.input_size = j.at("input_size").get<std::int64_t>();
    s.base_width = j.at("base_width").get<double>();
    s.noise_channels = j.value("noise_channels", std::int64_t{1});
    s.init_std = j.value("init_std", 0.02);
    s.seed = j.value("seed", std::uint64_t{0});
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("model config: ") + e.what());
  }
}

ChangeDetector::ChangeDetector(const ModelSpec& spec) : spec_(spec) {
  RngStream rng(spec.seed);
  if (spec.kind == ModelKind::wnet) {
    WNetConfig c;
    c.input_size = spec.input_size;
    c.base_width = spec.base_width;
    c.init_std = spec.init_std;
    wnet_ = std::make_unique<WNet<float>>(c, rng);
    params_.append(wnet_->parameters());
    return;
  }
  GeneratorConfig g = GeneratorConfig::make(spec.input_size, spec.base_width, spec.noise_channels);
  g.wnet.init_std = spec.init_std;
  DiscriminatorConfig d;
  d.input_size = spec.input_size;
  d.base_width = spec.base_width;
  d.init_std = spec.init_std;
  generator_ = std::make_unique<Generator<float>>(g, rng);
  discriminator_ = std::make_unique<Discriminator<float>>(d, rng);
  params_.append(generator_->parameters(), "generator.");
  params_.append(discriminator_->parameters());
}

Tensor<float> ChangeDetector::predict(const Tensor<float>& x1, const Tensor<float>& x2, RngStream& noise) const {
  auto tape = Tape<float>::inference();
  const Variable<float> a(x1), b(x2);
  Tensor<float> out;
  if (wnet_) {
    out = activation(tape, Activation::sigmoid(), wnet_->forward(tape, a, b)).value();
  } else {
    const Variable<float> z(generator_->sample_noise(noise, x1.dim(0)));
    out = generator_->forward(tape, a, b, z).value();
    for (auto& v : out.data()) v = 0.5f * (v + 1.0f);
  }
  return out;
}

ProbMap ChangeDetector::predict_image(const Image& t1, const Image& t2, std::int64_t stride, RngStream& noise,
                                      TilePlan* plan_out) const {
  if (t1.width != t2.width || t1.height != t2.height) {
    throw ShapeError("predict_image: t1 and t2 differ in size");
  }
  const TilePlan plan = plan_tiles(t1.width, t1.height, spec_.input_size, stride);
  if (plan_out) *plan_out = plan;
  return tiled_predict(plan, [&](const TileOrigin& o) {
    const auto p = spec_.input_size;
    const auto prob = predict(image_to_tensor<float>(t1.crop(o.x, o.y, p, p)),
                              image_to_tensor<float>(t2.crop(o.x, o.y, p, p)), noise);
    return tensor_to_map(prob);
  });
}

namespace {

struct Batch {
  Tensor<float> x1, x2, gt;  // gt in {0,1}
};

Batch make_batch(const std::vector<const PatchSample*>& items) {
  std::vector<Tensor<float>> a, b, g;
  for (const auto* s : items) {
    a.push_back(image_to_tensor<float>(s->patch.t1));
    b.push_back(image_to_tensor<float>(s->patch.t2));
    g.push_back(mask_to_tensor<float>(s->patch.gt));
  }
  return {stack_batch(a), stack_batch(b), stack_batch(g)};
}

double validation_loss(ChangeDetector& det, const std::vector<PatchSample>& val, RngStream noise) {
  if (val.empty()) return 0.0;
  double total = 0.0;
  for (const auto& s : val) {
    const Batch batch = make_batch({&s});
    if (det.wnet()) {
      auto tape = Tape<float>::inference();
      auto logits = det.wnet()->forward(tape, Variable<float>(batch.x1), Variable<float>(batch.x2));
      total += sigmoid_cross_entropy(tape, logits, batch.gt).value()[0];
    } else {
      const Tensor<float> prob = det.predict(batch.x1, batch.x2, noise);
      double acc = 0.0;
      for (std::int64_t i = 0; i < prob.numel(); ++i) acc += std::abs((2.0 * prob[i] - 1.0) - (2.0 * batch.gt[i] - 1.0));
      total += acc / static_cast<double>(prob.numel());
    }
  }
  return total / static_cast<double>(val.size());
}

}  // namespace

TrainSummary train(ChangeDetector& det, const std::vector<PairSample>& train_set,
                   const std::vector<PairSample>& val_set, const TrainConfig& config,
                   const std::function<void(const StepLog&)>& on_step) {
  if (train_set.empty()) throw std::invalid_argument("train: empty training set");
  if (config.epochs < 1 || config.batch < 1 || config.patches_per_pair < 1) {
    throw std::invalid_argument("train: epochs, batch and patches_per_pair must be >= 1");
  }
  const std::int64_t patch = det.spec().input_size;
  RngStream rng(config.seed);
  RngStream crop_rng = rng.fork(1);
  RngStream noise_rng = rng.fork(2);
  RngStream val_rng = rng.fork(3);

  std::vector<PatchSample> val_patches;
  for (const auto& p : val_set) {
    auto c = crop_patches(p, patch, 1, val_rng);
    val_patches.push_back(std::move(c.front()));
  }
  const RngStream val_noise = rng.fork(4);

  const LrSchedule schedule(LrScheduleConfig{config.adam.lr, config.patience, config.decay, config.lr_floor});
  std::unique_ptr<Adam<float>> adam;
  std::unique_ptr<GanTrainer<float>> gan;
  if (det.wnet()) {
    adam = std::make_unique<Adam<float>>(det.parameters().variables(), config.adam);
  } else {
    gan = std::make_unique<GanTrainer<float>>(
        *det.generator(), *det.discriminator(),
        GanTrainerConfig{config.adam, config.lambda, config.generator_updates_per_step});
  }

  TrainSummary summary;
  double lr = config.adam.lr;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<PatchSample> patches;
    for (const auto& p : train_set) {
      auto c = crop_patches(p, patch, config.patches_per_pair, crop_rng);
      for (auto& s : c) patches.push_back(std::move(s));
    }
    for (std::size_t i = 0; i + 1 < patches.size(); ++i) {
      const auto j = static_cast<std::size_t>(crop_rng.uniform_int(static_cast<std::int64_t>(i),
                                                                  static_cast<std::int64_t>(patches.size() - 1)));
      std::swap(patches[i], patches[j]);
    }
    for (std::size_t start = 0; start < patches.size(); start += static_cast<std::size_t>(config.batch)) {
      if (config.max_steps > 0 && summary.steps >= config.max_steps) break;
      const auto t0 = std::chrono::steady_clock::now();
      std::vector<const PatchSample*> items;
      for (std::size_t k = start; k < std::min(patches.size(), start + static_cast<std::size_t>(config.batch)); ++k) {
        items.push_back(&patches[k]);
      }
      const Batch batch = make_batch(items);
      StepLog log;
      if (adam) {
        Tape<float> tape;
        auto logits = det.wnet()->forward(tape, Variable<float>(batch.x1), Variable<float>(batch.x2));
        auto loss = sigmoid_cross_entropy(tape, logits, batch.gt);
        log.loss = loss.value()[0];
        if (!std::isfinite(log.loss)) throw NonFiniteError("train: non-finite loss at step " + std::to_string(summary.steps));
        tape.backward(loss);
        adam->step();
        adam->zero_grad();
      } else {
        const auto r = gan->step(GanBatch<float>{batch.x1, batch.x2, mask_to_signed(batch.gt)}, noise_rng);
        log.loss = r.g_loss;
        log.d_loss = r.d_loss;
        log.g_loss_adv = r.g_loss_adv;
        log.g_loss_l1 = r.g_loss_l1;
      }
      ++summary.steps;
      log.step = summary.steps;
      log.epoch = epoch;
      log.lr = lr;
      log.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      if (on_step) on_step(log);
    }
    if (!val_patches.empty()) {
      summary.validation_losses.push_back(validation_loss(det, val_patches, val_noise));
      lr = schedule.lr_for(summary.validation_losses);
      if (adam) adam->set_lr(lr);
      if (gan) gan->set_lr(lr);
    }
    if (config.max_steps > 0 && summary.steps >= config.max_steps) break;
  }
  if (gan) {
    summary.d_updates = gan->d_updates();
    summary.g_updates = gan->g_updates();
  }
  summary.final_lr = lr;
  return summary;
}

double pixel_accuracy(const ChangeDetector& det, const std::vector<PairSample>& samples, double t, RngStream& noise) {
  std::int64_t correct = 0, total = 0;
  for (const auto& s : samples) {
    const auto stride = std::max<std::int64_t>(1, det.spec().input_size / 2);
    const BinaryMap pred = threshold(det.predict_image(s.t1, s.t2, stride, noise), t);
    for (std::size_t i = 0; i < pred.size(); ++i) correct += pred.values[i] == s.gt.values[i];
    total += static_cast<std::int64_t>(pred.size());
  }
  return static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace cdnet
