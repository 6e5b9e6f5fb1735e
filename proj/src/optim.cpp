#include "cdnet/optim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cdnet/errors.hpp"

namespace cdnet {

template <typename T>
Adam<T>::Adam(std::vector<Variable<T>> params, AdamConfig config) : params_(std::move(params)), config_(config) {
  if (!(config_.lr > 0.0) || config_.beta1 < 0.0 || config_.beta1 >= 1.0 || config_.beta2 < 0.0 ||
      config_.beta2 >= 1.0 || !(config_.eps > 0.0)) {
    throw std::invalid_argument("Adam: invalid hyperparameters");
  }
  for (const auto& p : params_) {
    m_.push_back(Tensor<T>::zeros(p.shape()));
    v_.push_back(Tensor<T>::zeros(p.shape()));
  }
}

template <typename T>
void Adam<T>::step() {
  for (const auto& p : params_) {
    if (!p.has_grad()) continue;
    for (auto g : p.grad().data()) {
      if (!std::isfinite(static_cast<double>(g))) throw NonFiniteError("Adam: non-finite gradient, step rejected");
    }
  }
  ++t_;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t k = 0; k < params_.size(); ++k) {
    auto& p = params_[k];
    auto w = p.mutable_value().data();
    auto m = m_[k].data();
    auto v = v_[k].data();
    const bool has = p.has_grad();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double g = has ? static_cast<double>(p.grad()[static_cast<std::int64_t>(i)]) : 0.0;
      const double mi = b1 * m[i] + (1.0 - b1) * g;
      const double vi = b2 * v[i] + (1.0 - b2) * g * g;
      m[i] = static_cast<T>(mi);
      v[i] = static_cast<T>(vi);
      const double m_hat = mi / c1;
      const double v_hat = vi / c2;
      w[i] = static_cast<T>(w[i] - config_.lr * m_hat / (std::sqrt(v_hat) + config_.eps));
    }
  }
}

template <typename T>
void Adam<T>::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

template class Adam<float>;
template class Adam<double>;

LrSchedule::LrSchedule(LrScheduleConfig config) : config_(config) {
  if (!(config_.initial_lr > 0.0) || config_.patience < 1 || !(config_.factor > 0.0 && config_.factor < 1.0) ||
      config_.floor < 0.0) {
    throw std::invalid_argument("LrSchedule: invalid configuration");
  }
}

double LrSchedule::lr_for(const std::vector<double>& validation_losses) const {
  if (validation_losses.empty()) throw std::invalid_argument("LrSchedule: empty validation history");
  double lr = std::max(config_.initial_lr, config_.floor);
  double best = validation_losses.front();
  int stale = 0;
  for (std::size_t i = 1; i < validation_losses.size(); ++i) {
    if (validation_losses[i] < best) {
      best = validation_losses[i];
      stale = 0;
      continue;
    }
    if (++stale >= config_.patience) {
      lr = std::max(lr * config_.factor, config_.floor);
      stale = 0;
    }
  }
  return lr;
}

}  // namespace cdnet
