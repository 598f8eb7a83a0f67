#pragma once

#include "ganforge/tensor.hpp"

namespace ganforge {

enum class Act { ReLU, LeakyReLU, Tanh, Sigmoid };

std::string act_name(Act kind);

// Spatial size algebra for k x k kernels.
int conv_out_size(int in, int k, int stride, int pad);
int conv_transpose_out_size(int in, int k, int stride, int pad, int out_pad);

// Output padding that makes conv_transpose2d undo conv2d's spatial reduction
// for the same (k, stride, pad). Always lands in [0, stride).
int transpose_out_pad_for(int conv_input_size, int k, int stride, int pad);

// Cross-correlation plus bias, lowered through im2col to a matrix multiply.
// input [N,Cin,H,W], weight [Cout,Cin,k,k], bias [Cout].
template <typename T>
Tensor<T> conv2d(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& bias,
                 int stride, int pad);

// Adjoint of conv2d's linear map: forward here equals conv2d's backward-data
// pass with the same geometry. input [N,Cin,H,W], weight [Cin,Cout,k,k],
// bias [Cout].
template <typename T>
Tensor<T> conv_transpose2d(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& bias,
                           int stride, int pad, int out_pad);

// Per-channel batch normalization over [N,C,H,W]. Train mode normalizes by
// batch statistics (biased variance) and folds them into the running stats by
// EMA with the given momentum; eval mode normalizes by the running stats.
template <typename T>
Tensor<T> batch_norm(const Tensor<T>& input, const Tensor<T>& gamma, const Tensor<T>& beta,
                     std::vector<T>& running_mean, std::vector<T>& running_var, bool train,
                     T momentum, T eps);

template <typename T>
Tensor<T> activate(const Tensor<T>& x, Act kind, T alpha = T(0));

template <typename T>
Tensor<T> relu(const Tensor<T>& x) {
  return activate(x, Act::ReLU);
}
template <typename T>
Tensor<T> leaky_relu(const Tensor<T>& x, T alpha) {
  return activate(x, Act::LeakyReLU, alpha);
}
template <typename T>
Tensor<T> tanh_op(const Tensor<T>& x) {
  return activate(x, Act::Tanh);
}
template <typename T>
Tensor<T> sigmoid_op(const Tensor<T>& x) {
  return activate(x, Act::Sigmoid);
}

// x [N,F] * w [F,G] + b [G] -> [N,G]
template <typename T>
Tensor<T> dense(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b);

template <typename T>
Tensor<T> reshape(const Tensor<T>& x, Shape shape);

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);

// Elementwise (Hadamard) product of same-shape tensors.
template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);

// Elementwise scale * x + shift.
template <typename T>
Tensor<T> affine(const Tensor<T>& x, T scale, T shift);

// Mean over all elements -> shape [1].
template <typename T>
Tensor<T> mean_all(const Tensor<T>& x);

// log(max(x, eps)). The clamp keeps the GAN losses finite when the
// discriminator saturates; gradient is zero in the clamped region.
template <typename T>
Tensor<T> log_clamped(const Tensor<T>& x, T eps = T(1e-12));

#define GANFORGE_OPS_DECL(T)                                                                      \
  extern template Tensor<T> conv2d<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, int, \
                                      int);                                                       \
  extern template Tensor<T> conv_transpose2d<T>(const Tensor<T>&, const Tensor<T>&,              \
                                                const Tensor<T>&, int, int, int);                 \
  extern template Tensor<T> batch_norm<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,  \
                                          std::vector<T>&, std::vector<T>&, bool, T, T);         \
  extern template Tensor<T> activate<T>(const Tensor<T>&, Act, T);                               \
  extern template Tensor<T> dense<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);      \
  extern template Tensor<T> reshape<T>(const Tensor<T>&, Shape);                                 \
  extern template Tensor<T> add<T>(const Tensor<T>&, const Tensor<T>&);                          \
  extern template Tensor<T> mul<T>(const Tensor<T>&, const Tensor<T>&);                          \
  extern template Tensor<T> affine<T>(const Tensor<T>&, T, T);                                   \
  extern template Tensor<T> mean_all<T>(const Tensor<T>&);                                       \
  extern template Tensor<T> log_clamped<T>(const Tensor<T>&, T);

GANFORGE_OPS_DECL(float)
GANFORGE_OPS_DECL(double)
#undef GANFORGE_OPS_DECL

}  // namespace ganforge
