#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "cdnet/cdgan.hpp"
#include "cdnet/dataset.hpp"
#include "cdnet/optim.hpp"
#include "cdnet/tiling.hpp"
#include "cdnet/wnet.hpp"

namespace cdnet {

enum class ModelKind { wnet, cdgan };

ModelKind parse_model_kind(const std::string& name);
const char* model_kind_name(ModelKind kind);

/// Everything needed to rebuild a model; stored as JSON inside checkpoints.
struct ModelSpec {
  ModelKind kind = ModelKind::wnet;
  std::int64_t input_size = 256;
  double base_width = 1.0;
  std::int64_t noise_channels = 1;  // cdgan only
  double init_std = 0.02;
  std::uint64_t seed = 0;

  std::string to_json() const;
  static ModelSpec from_json(const std::string& text);
};

/// A W-Net or a CDGAN pair behind one interface that yields change probabilities.
class ChangeDetector {
 public:
  explicit ChangeDetector(const ModelSpec& spec);

  const ModelSpec& spec() const { return spec_; }
  /// All trainable tensors (generator then discriminator for CDGAN).
  ParameterSet<float>& parameters() { return params_; }
  const ParameterSet<float>& parameters() const { return params_; }

  WNet<float>* wnet() { return wnet_.get(); }
  Generator<float>* generator() { return generator_.get(); }
  Discriminator<float>* discriminator() { return discriminator_.get(); }

  /// [N,1,H,W] change probabilities: sigmoid of W-Net logits, or the generator's
  /// tanh output mapped from [-1,1] to [0,1].
  Tensor<float> predict(const Tensor<float>& x1, const Tensor<float>& x2, RngStream& noise) const;

  /// Tiled full-image prediction with overlap averaging.
  ProbMap predict_image(const Image& t1, const Image& t2, std::int64_t stride, RngStream& noise,
                        TilePlan* plan_out = nullptr) const;

 private:
  ModelSpec spec_;
  std::unique_ptr<WNet<float>> wnet_;
  std::unique_ptr<Generator<float>> generator_;
  std::unique_ptr<Discriminator<float>> discriminator_;
  ParameterSet<float> params_;
};

struct TrainConfig {
  int epochs = 1;
  int batch = 4;
  AdamConfig adam;
  double lambda = 100.0;
  int generator_updates_per_step = 2;
  int patience = 5;
  double decay = 0.5;
  double lr_floor = 1e-6;
  int patches_per_pair = 1;
  std::int64_t max_steps = 0;  // 0 = no limit
  std::uint64_t seed = 0;
};

struct StepLog {
  std::int64_t step = 0;
  int epoch = 0;
  double loss = 0.0;  // W-Net cross-entropy; for CDGAN the generator total
  double d_loss = 0.0;
  double g_loss_adv = 0.0;
  double g_loss_l1 = 0.0;
  double lr = 0.0;
  double wall_ms = 0.0;
};

struct TrainSummary {
  std::int64_t steps = 0;
  std::int64_t d_updates = 0;
  std::int64_t g_updates = 0;
  std::vector<double> validation_losses;
  double final_lr = 0.0;
};

/// Trains on random patches (of the model's input size) drawn from `train_set`.
/// After each epoch the validation loss feeds the plateau schedule.
TrainSummary train(ChangeDetector& detector, const std::vector<PairSample>& train_set,
                   const std::vector<PairSample>& val_set, const TrainConfig& config,
                   const std::function<void(const StepLog&)>& on_step = {});

/// Fraction of pixels whose thresholded prediction matches the mask.
double pixel_accuracy(const ChangeDetector& detector, const std::vector<PairSample>& samples, double t,
                      RngStream& noise);

}  // namespace cdnet
