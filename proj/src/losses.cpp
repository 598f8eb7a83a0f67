#include "ganforge/losses.hpp"

#include "ganforge/ops.hpp"

namespace ganforge {

GLossMode parse_g_loss_mode(const std::string& name) {
  if (name == "paper_literal") return GLossMode::PaperLiteral;
  if (name == "non_saturating") return GLossMode::NonSaturating;
  throw ConfigError("g_loss_mode must be 'paper_literal' or 'non_saturating', got '" + name + "'");
}

std::string g_loss_mode_name(GLossMode mode) {
  return mode == GLossMode::PaperLiteral ? "paper_literal" : "non_saturating";
}

template <typename T>
Tensor<T> d_loss(const Tensor<T>& p_real, const Tensor<T>& p_fake) {
  if (p_real.numel() != p_fake.numel())
    throw ConfigError("d_loss: real batch " + shape_str(p_real.shape()) +
                      " and fake batch " + shape_str(p_fake.shape()) + " differ in size");
  auto real_term = mean_all(log_clamped(p_real));
  auto fake_term = mean_all(log_clamped(affine(p_fake, T(-1), T(1))));
  return affine(add(real_term, fake_term), T(-1), T(0));
}

template <typename T>
Tensor<T> g_loss(const Tensor<T>& p_fake, GLossMode mode) {
  if (mode == GLossMode::PaperLiteral)
    return mean_all(log_clamped(affine(p_fake, T(-1), T(1))));
  return affine(mean_all(log_clamped(p_fake)), T(-1), T(0));
}

template Tensor<float> d_loss<float>(const Tensor<float>&, const Tensor<float>&);
template Tensor<double> d_loss<double>(const Tensor<double>&, const Tensor<double>&);
template Tensor<float> g_loss<float>(const Tensor<float>&, GLossMode);
template Tensor<double> g_loss<double>(const Tensor<double>&, GLossMode);

}  // namespace ganforge
