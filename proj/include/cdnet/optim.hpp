#pragma once

#include <cstdint>
#include <vector>

#include "cdnet/autograd.hpp"

namespace cdnet {

struct AdamConfig {
  double lr = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Bias-corrected Adam over a fixed parameter list. Moments start at zero.
template <typename T>
class Adam {
 public:
  Adam(std::vector<Variable<T>> params, AdamConfig config = {});

  /// Applies one update from the parameters' accumulated gradients. Parameters
  /// with no gradient are treated as having a zero gradient. Throws
  /// NonFiniteError, leaving every parameter and moment untouched, if any
  /// gradient is NaN or Inf.
  void step();
  void zero_grad();

  std::int64_t steps() const { return t_; }
  double lr() const { return config_.lr; }
  void set_lr(double lr) { config_.lr = lr; }
  const AdamConfig& config() const { return config_; }
  const Tensor<T>& first_moment(std::size_t i) const { return m_.at(i); }
  const Tensor<T>& second_moment(std::size_t i) const { return v_.at(i); }

 private:
  std::vector<Variable<T>> params_;
  AdamConfig config_;
  std::vector<Tensor<T>> m_;
  std::vector<Tensor<T>> v_;
  std::int64_t t_ = 0;
};

extern template class Adam<float>;
extern template class Adam<double>;

struct LrScheduleConfig {
  double initial_lr = 2e-4;
  int patience = 5;
  double factor = 0.5;
  double floor = 1e-6;
};

/// Reduce-on-plateau rule: whenever the best validation loss has not improved for
/// `patience` consecutive epochs the rate is multiplied by `factor`, never going
/// below `floor`. The rate is a pure function of the loss history.
class LrSchedule {
 public:
  explicit LrSchedule(LrScheduleConfig config = {});
  double lr_for(const std::vector<double>& validation_losses) const;
  const LrScheduleConfig& config() const { return config_; }

 private:
  LrScheduleConfig config_;
};

}  // namespace cdnet
