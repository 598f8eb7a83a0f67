#include "ganforge/optimizer.hpp"

#include <cmath>

namespace ganforge {

template <typename T>
Adam<T>::Adam(std::vector<ParamRef<T>> params, AdamConfig cfg)
    : params_(std::move(params)), cfg_(cfg) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const auto& p : params_) {
    m_.emplace_back(p.tensor.numel(), T(0));
    v_.emplace_back(p.tensor.numel(), T(0));
  }
}

template <typename T>
void Adam<T>::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (size_t i = 0; i < params_.size(); ++i) {
    auto& p = params_[i];
    auto& val = p.tensor.values();
    auto& m = m_[i];
    auto& v = v_[i];
    const bool has_grad = p.tensor.has_grad();
    const auto& g = p.tensor.grad();
    for (size_t j = 0; j < val.size(); ++j) {
      const double gj = has_grad ? static_cast<double>(g[j]) : 0.0;
      if (!std::isfinite(gj))
        throw NumericError("non-finite gradient in parameter '" + p.name + "' at element " +
                           std::to_string(j));
      const double mj = cfg_.beta1 * m[j] + (1.0 - cfg_.beta1) * gj;
      const double vj = cfg_.beta2 * v[j] + (1.0 - cfg_.beta2) * gj * gj;
      m[j] = static_cast<T>(mj);
      v[j] = static_cast<T>(vj);
      const double mhat = mj / bc1;
      const double vhat = vj / bc2;
      val[j] = static_cast<T>(val[j] - cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.eps));
    }
  }
}

template <typename T>
void Adam<T>::zero_grad() {
  for (auto& p : params_) p.tensor.zero_grad();
}

template class Adam<float>;
template class Adam<double>;

}  // namespace ganforge
