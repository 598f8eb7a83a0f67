#pragma once

#include "ganforge/tensor.hpp"

namespace ganforge {

// Generator objective flavor. PaperLiteral minimizes mean log(1 - D(G(z)));
// NonSaturating minimizes -mean log D(G(z)). Both drive D(G(z)) upward.
enum class GLossMode : uint8_t { PaperLiteral = 0, NonSaturating = 1 };

GLossMode parse_g_loss_mode(const std::string& name);
std::string g_loss_mode_name(GLossMode mode);

// -(mean log D(x) + mean log(1 - D(G(z)))), log-clamped at 1e-12.
// Inputs are discriminator probability outputs for a real and a fake batch
// of the same size.
template <typename T>
Tensor<T> d_loss(const Tensor<T>& p_real, const Tensor<T>& p_fake);

template <typename T>
Tensor<T> g_loss(const Tensor<T>& p_fake, GLossMode mode);

extern template Tensor<float> d_loss<float>(const Tensor<float>&, const Tensor<float>&);
extern template Tensor<double> d_loss<double>(const Tensor<double>&, const Tensor<double>&);
extern template Tensor<float> g_loss<float>(const Tensor<float>&, GLossMode);
extern template Tensor<double> g_loss<double>(const Tensor<double>&, GLossMode);

}  // namespace ganforge
