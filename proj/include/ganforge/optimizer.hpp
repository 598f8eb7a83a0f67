#pragma once

#include <vector>

#include "ganforge/layers.hpp"

namespace ganforge {

struct AdamConfig {
  double learning_rate = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Standard Adam with bias correction. A parameter whose grad buffer is empty
// is treated as having a zero gradient.
template <typename T>
class Adam {
 public:
  Adam(std::vector<ParamRef<T>> params, AdamConfig cfg);

  // Applies one update from the current grads; throws NumericError naming the
  // parameter if its gradient is non-finite.
  void step();

  void zero_grad();

  long t() const { return t_; }
  void set_t(long t) { t_ = t; }
  const AdamConfig& config() const { return cfg_; }
  const std::vector<ParamRef<T>>& params() const { return params_; }
  std::vector<std::vector<T>>& moments_m() { return m_; }
  std::vector<std::vector<T>>& moments_v() { return v_; }
  const std::vector<std::vector<T>>& moments_m() const { return m_; }
  const std::vector<std::vector<T>>& moments_v() const { return v_; }

 private:
  std::vector<ParamRef<T>> params_;
  AdamConfig cfg_;
  std::vector<std::vector<T>> m_, v_;
  long t_ = 0;
};

extern template class Adam<float>;
extern template class Adam<double>;

}  // namespace ganforge
