#include "ganforge/ops.hpp"

#include <cmath>

namespace ganforge {

namespace {

// C[M,N] (+)= A[M,K] * B[K,N], all row-major.
template <typename T>
void gemm_nn(int M, int N, int K, const T* A, const T* B, T* C, bool accumulate) {
  if (!accumulate) std::fill(C, C + static_cast<size_t>(M) * N, T(0));
  for (int i = 0; i < M; ++i) {
    for (int k = 0; k < K; ++k) {
      const T a = A[static_cast<size_t>(i) * K + k];
      if (a == T(0)) continue;
      const T* brow = B + static_cast<size_t>(k) * N;
      T* crow = C + static_cast<size_t>(i) * N;
      for (int j = 0; j < N; ++j) crow[j] += a * brow[j];
    }
  }
}

// C[M,N] (+)= A[M,K] * B^T where B is [N,K].
template <typename T>
void gemm_nt(int M, int N, int K, const T* A, const T* B, T* C, bool accumulate) {
  for (int i = 0; i < M; ++i) {
    const T* arow = A + static_cast<size_t>(i) * K;
    for (int j = 0; j < N; ++j) {
      const T* brow = B + static_cast<size_t>(j) * K;
      T sum = 0;
      for (int k = 0; k < K; ++k) sum += arow[k] * brow[k];
      T* c = C + static_cast<size_t>(i) * N + j;
      *c = accumulate ? *c + sum : sum;
    }
  }
}

// C[M,N] (+)= A^T * B where A is [K,M] and B is [K,N].
template <typename T>
void gemm_tn(int M, int N, int K, const T* A, const T* B, T* C, bool accumulate) {
  if (!accumulate) std::fill(C, C + static_cast<size_t>(M) * N, T(0));
  for (int k = 0; k < K; ++k) {
    const T* arow = A + static_cast<size_t>(k) * M;
    const T* brow = B + static_cast<size_t>(k) * N;
    for (int i = 0; i < M; ++i) {
      const T a = arow[i];
      if (a == T(0)) continue;
      T* crow = C + static_cast<size_t>(i) * N;
      for (int j = 0; j < N; ++j) crow[j] += a * brow[j];
    }
  }
}

// img [C,H,W] -> cols [C*k*k, outH*outW] for the given conv geometry.
template <typename T>
void im2col(const T* img, int C, int H, int W, int k, int stride, int pad, int outH, int outW,
            T* cols) {
  const int L = outH * outW;
  for (int c = 0; c < C; ++c) {
    for (int ki = 0; ki < k; ++ki) {
      for (int kj = 0; kj < k; ++kj) {
        const int row = (c * k + ki) * k + kj;
        T* dst = cols + static_cast<size_t>(row) * L;
        for (int oh = 0; oh < outH; ++oh) {
          const int ih = oh * stride - pad + ki;
          for (int ow = 0; ow < outW; ++ow) {
            const int iw = ow * stride - pad + kj;
            const bool in = ih >= 0 && ih < H && iw >= 0 && iw < W;
            dst[oh * outW + ow] = in ? img[(static_cast<size_t>(c) * H + ih) * W + iw] : T(0);
          }
        }
      }
    }
  }
}

// Adjoint of im2col: scatters cols back into img with accumulation.
template <typename T>
void col2im(const T* cols, int C, int H, int W, int k, int stride, int pad, int outH, int outW,
            T* img) {
  const int L = outH * outW;
  for (int c = 0; c < C; ++c) {
    for (int ki = 0; ki < k; ++ki) {
      for (int kj = 0; kj < k; ++kj) {
        const int row = (c * k + ki) * k + kj;
        const T* src = cols + static_cast<size_t>(row) * L;
        for (int oh = 0; oh < outH; ++oh) {
          const int ih = oh * stride - pad + ki;
          if (ih < 0 || ih >= H) continue;
          for (int ow = 0; ow < outW; ++ow) {
            const int iw = ow * stride - pad + kj;
            if (iw < 0 || iw >= W) continue;
            img[(static_cast<size_t>(c) * H + ih) * W + iw] += src[oh * outW + ow];
          }
        }
      }
    }
  }
}

void require(bool cond, const std::string& msg) {
  if (!cond) throw ConfigError(msg);
}

}  // namespace

std::string act_name(Act kind) {
  switch (kind) {
    case Act::ReLU: return "relu";
    case Act::LeakyReLU: return "leaky_relu";
    case Act::Tanh: return "tanh";
    case Act::Sigmoid: return "sigmoid";
  }
  return "?";
}

int conv_out_size(int in, int k, int stride, int pad) {
  return (in + 2 * pad - k) / stride + 1;
}

int conv_transpose_out_size(int in, int k, int stride, int pad, int out_pad) {
  return (in - 1) * stride - 2 * pad + k + out_pad;
}

int transpose_out_pad_for(int conv_input_size, int k, int stride, int pad) {
  const int reduced = conv_out_size(conv_input_size, k, stride, pad);
  return conv_input_size - conv_transpose_out_size(reduced, k, stride, pad, 0);
}

template <typename T>
Tensor<T> conv2d(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& bias,
                 int stride, int pad) {
  require(input.ndim() == 4, "conv2d: input must be 4-D, got " + shape_str(input.shape()));
  require(weight.ndim() == 4, "conv2d: weight must be 4-D, got " + shape_str(weight.shape()));
  const int N = input.dim(0), Cin = input.dim(1), H = input.dim(2), W = input.dim(3);
  const int Cout = weight.dim(0), k = weight.dim(2);
  require(weight.dim(1) == Cin, "conv2d: input channels " + shape_str(input.shape()) +
                                    " do not match weight " + shape_str(weight.shape()));
  require(weight.dim(3) == k, "conv2d: kernel must be square, got " + shape_str(weight.shape()));
  require(static_cast<int>(bias.numel()) == Cout,
          "conv2d: bias " + shape_str(bias.shape()) + " does not match weight " +
              shape_str(weight.shape()));
  require(k >= 1 && stride >= 1 && pad >= 0, "conv2d: need k >= 1, stride >= 1, pad >= 0");
  require(H + 2 * pad >= k && W + 2 * pad >= k,
          "conv2d: kernel " + std::to_string(k) + " exceeds padded input " +
              shape_str(input.shape()));

  const int Ho = conv_out_size(H, k, stride, pad);
  const int Wo = conv_out_size(W, k, stride, pad);
  const int L = Ho * Wo;
  const int ckk = Cin * k * k;

  std::vector<T> out(static_cast<size_t>(N) * Cout * L);
  std::vector<T> cols(static_cast<size_t>(ckk) * L);
  const T* xp = input.values().data();
  const T* wp = weight.values().data();
  const T* bp = bias.values().data();
  for (int n = 0; n < N; ++n) {
    im2col(xp + static_cast<size_t>(n) * Cin * H * W, Cin, H, W, k, stride, pad, Ho, Wo,
           cols.data());
    T* yn = out.data() + static_cast<size_t>(n) * Cout * L;
    gemm_nn(Cout, L, ckk, wp, cols.data(), yn, false);
    for (int c = 0; c < Cout; ++c)
      for (int l = 0; l < L; ++l) yn[static_cast<size_t>(c) * L + l] += bp[c];
  }

  auto x = input;
  auto w = weight;
  auto b = bias;
  return Tensor<T>::make_op(
      {N, Cout, Ho, Wo}, std::move(out), "conv2d", {input, weight, bias},
      [x, w, b, stride, pad, N, Cin, H, W, Cout, k, Ho, Wo, L, ckk](auto& node) mutable {
        const T* dy = node.grad.data();
        std::vector<T> cols(static_cast<size_t>(ckk) * L);
        std::vector<T> dcols;
        if (x.requires_grad()) dcols.resize(cols.size());
        for (int n = 0; n < N; ++n) {
          const T* dyn = dy + static_cast<size_t>(n) * Cout * L;
          if (w.requires_grad()) {
            im2col(x.values().data() + static_cast<size_t>(n) * Cin * H * W, Cin, H, W, k, stride,
                   pad, Ho, Wo, cols.data());
            gemm_nt(Cout, ckk, L, dyn, cols.data(), w.grad().data(), true);
          }
          if (b.requires_grad()) {
            T* db = b.grad().data();
            for (int c = 0; c < Cout; ++c) {
              T s = 0;
              for (int l = 0; l < L; ++l) s += dyn[static_cast<size_t>(c) * L + l];
              db[c] += s;
            }
          }
          if (x.requires_grad()) {
            gemm_tn(ckk, L, Cout, w.values().data(), dyn, dcols.data(), false);
            col2im(dcols.data(), Cin, H, W, k, stride, pad, Ho, Wo,
                   x.grad().data() + static_cast<size_t>(n) * Cin * H * W);
          }
        }
      });
}

template <typename T>
Tensor<T> conv_transpose2d(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& bias,
                           int stride, int pad, int out_pad) {
  require(input.ndim() == 4,
          "conv_transpose2d: input must be 4-D, got " + shape_str(input.shape()));
  require(weight.ndim() == 4,
          "conv_transpose2d: weight must be 4-D, got " + shape_str(weight.shape()));
  const int N = input.dim(0), Cin = input.dim(1), H = input.dim(2), W = input.dim(3);
  const int Cout = weight.dim(1), k = weight.dim(2);
  require(weight.dim(0) == Cin, "conv_transpose2d: input channels " + shape_str(input.shape()) +
                                    " do not match weight " + shape_str(weight.shape()));
  require(weight.dim(3) == k,
          "conv_transpose2d: kernel must be square, got " + shape_str(weight.shape()));
  require(static_cast<int>(bias.numel()) == Cout,
          "conv_transpose2d: bias " + shape_str(bias.shape()) + " does not match weight " +
              shape_str(weight.shape()));
  require(stride >= 1 && pad >= 0 && out_pad >= 0, "conv_transpose2d: bad geometry");
  require(out_pad < stride, "conv_transpose2d: out_pad " + std::to_string(out_pad) +
                                " must be < stride " + std::to_string(stride));

  const int Ho = conv_transpose_out_size(H, k, stride, pad, out_pad);
  const int Wo = conv_transpose_out_size(W, k, stride, pad, out_pad);
  require(Ho >= 1 && Wo >= 1, "conv_transpose2d: output collapses to zero size");
  const int L = H * W;  // the adjoint conv's output positions
  const int ckk = Cout * k * k;

  std::vector<T> out(static_cast<size_t>(N) * Cout * Ho * Wo, T(0));
  std::vector<T> cols(static_cast<size_t>(ckk) * L);
  const T* xp = input.values().data();
  const T* wp = weight.values().data();
  const T* bp = bias.values().data();
  for (int n = 0; n < N; ++n) {
    // cols = W^T x, then scatter back through the conv geometry.
    gemm_tn(ckk, L, Cin, wp, xp + static_cast<size_t>(n) * Cin * L, cols.data(), false);
    T* yn = out.data() + static_cast<size_t>(n) * Cout * Ho * Wo;
    col2im(cols.data(), Cout, Ho, Wo, k, stride, pad, H, W, yn);
    for (int c = 0; c < Cout; ++c)
      for (int l = 0; l < Ho * Wo; ++l) yn[static_cast<size_t>(c) * Ho * Wo + l] += bp[c];
  }

  auto x = input;
  auto w = weight;
  auto b = bias;
  return Tensor<T>::make_op(
      {N, Cout, Ho, Wo}, std::move(out), "conv_transpose2d", {input, weight, bias},
      [x, w, b, stride, pad, N, Cin, H, W, Cout, k, Ho, Wo, L, ckk](auto& node) mutable {
        const T* dy = node.grad.data();
        std::vector<T> cols(static_cast<size_t>(ckk) * L);
        for (int n = 0; n < N; ++n) {
          const T* dyn = dy + static_cast<size_t>(n) * Cout * Ho * Wo;
          im2col(dyn, Cout, Ho, Wo, k, stride, pad, H, W, cols.data());
          if (x.requires_grad())
            gemm_nn(Cin, L, ckk, w.values().data(), cols.data(),
                    x.grad().data() + static_cast<size_t>(n) * Cin * L, true);
          if (w.requires_grad())
            gemm_nt(Cin, ckk, L, x.values().data() + static_cast<size_t>(n) * Cin * L, cols.data(),
                    w.grad().data(), true);
          if (b.requires_grad()) {
            T* db = b.grad().data();
            for (int c = 0; c < Cout; ++c) {
              T s = 0;
              for (int l = 0; l < Ho * Wo; ++l) s += dyn[static_cast<size_t>(c) * Ho * Wo + l];
              db[c] += s;
            }
          }
        }
      });
}

template <typename T>
Tensor<T> batch_norm(const Tensor<T>& input, const Tensor<T>& gamma, const Tensor<T>& beta,
                     std::vector<T>& running_mean, std::vector<T>& running_var, bool train,
                     T momentum, T eps) {
  require(input.ndim() == 4, "batch_norm: input must be 4-D, got " + shape_str(input.shape()));
  const int N = input.dim(0), C = input.dim(1), H = input.dim(2), W = input.dim(3);
  require(static_cast<int>(gamma.numel()) == C && static_cast<int>(beta.numel()) == C,
          "batch_norm: gamma/beta size must match channels " + shape_str(input.shape()));
  require(running_mean.size() == static_cast<size_t>(C) &&
              running_var.size() == static_cast<size_t>(C),
          "batch_norm: running stats size mismatch");
  const long m = static_cast<long>(N) * H * W;
  if (train) require(m >= 2, "batch_norm: train mode needs N*H*W >= 2, got " +
                                 std::to_string(m) + " for input " + shape_str(input.shape()));

  std::vector<T> mean(C), var(C);
  const T* xp = input.values().data();
  const size_t plane = static_cast<size_t>(H) * W;
  if (train) {
    for (int c = 0; c < C; ++c) {
      double sum = 0;
      for (int n = 0; n < N; ++n) {
        const T* p = xp + (static_cast<size_t>(n) * C + c) * plane;
        for (size_t i = 0; i < plane; ++i) sum += p[i];
      }
      const double mu = sum / static_cast<double>(m);
      double sq = 0;
      for (int n = 0; n < N; ++n) {
        const T* p = xp + (static_cast<size_t>(n) * C + c) * plane;
        for (size_t i = 0; i < plane; ++i) {
          const double d = p[i] - mu;
          sq += d * d;
        }
      }
      mean[c] = static_cast<T>(mu);
      var[c] = static_cast<T>(sq / static_cast<double>(m));
      running_mean[c] = momentum * running_mean[c] + (T(1) - momentum) * mean[c];
      running_var[c] = momentum * running_var[c] + (T(1) - momentum) * var[c];
    }
  } else {
    mean = running_mean;
    var = running_var;
  }

  std::vector<T> out(input.numel());
  const T* gp = gamma.values().data();
  const T* bp = beta.values().data();
  for (int n = 0; n < N; ++n) {
    for (int c = 0; c < C; ++c) {
      const T invstd = T(1) / std::sqrt(var[c] + eps);
      const T* p = xp + (static_cast<size_t>(n) * C + c) * plane;
      T* q = out.data() + (static_cast<size_t>(n) * C + c) * plane;
      for (size_t i = 0; i < plane; ++i) q[i] = gp[c] * (p[i] - mean[c]) * invstd + bp[c];
    }
  }

  auto x = input;
  auto g = gamma;
  auto b = beta;
  return Tensor<T>::make_op(
      {N, C, H, W}, std::move(out), "batch_norm", {input, gamma, beta},
      [x, g, b, mean, var, train, eps, N, C, plane, m](auto& node) mutable {
        const T* dy = node.grad.data();
        const T* xp = x.values().data();
        const T* gp = g.values().data();
        for (int c = 0; c < C; ++c) {
          const T invstd = T(1) / std::sqrt(var[c] + eps);
          // Per-channel reductions over dy and dy*xhat.
          double sum_dy = 0, sum_dy_xhat = 0;
          for (int n = 0; n < N; ++n) {
            const size_t off = (static_cast<size_t>(n) * C + c) * plane;
            for (size_t i = 0; i < plane; ++i) {
              const T xhat = (xp[off + i] - mean[c]) * invstd;
              sum_dy += dy[off + i];
              sum_dy_xhat += dy[off + i] * xhat;
            }
          }
          if (g.requires_grad()) g.grad()[c] += static_cast<T>(sum_dy_xhat);
          if (b.requires_grad()) b.grad()[c] += static_cast<T>(sum_dy);
          if (!x.requires_grad()) continue;
          T* dx = x.grad().data();
          if (train) {
            const T inv_m = T(1) / static_cast<T>(m);
            for (int n = 0; n < N; ++n) {
              const size_t off = (static_cast<size_t>(n) * C + c) * plane;
              for (size_t i = 0; i < plane; ++i) {
                const T xhat = (xp[off + i] - mean[c]) * invstd;
                dx[off + i] += gp[c] * invstd *
                               (dy[off + i] - inv_m * static_cast<T>(sum_dy) -
                                xhat * inv_m * static_cast<T>(sum_dy_xhat));
              }
            }
          } else {
            for (int n = 0; n < N; ++n) {
              const size_t off = (static_cast<size_t>(n) * C + c) * plane;
              for (size_t i = 0; i < plane; ++i) dx[off + i] += dy[off + i] * gp[c] * invstd;
            }
          }
        }
      });
}

template <typename T>
Tensor<T> activate(const Tensor<T>& x, Act kind, T alpha) {
  std::vector<T> out(x.numel());
  const auto& v = x.values();
  switch (kind) {
    case Act::ReLU:
      for (size_t i = 0; i < v.size(); ++i) out[i] = v[i] > T(0) ? v[i] : T(0);
      break;
    case Act::LeakyReLU:
      for (size_t i = 0; i < v.size(); ++i) out[i] = v[i] > T(0) ? v[i] : alpha * v[i];
      break;
    case Act::Tanh:
      for (size_t i = 0; i < v.size(); ++i) out[i] = std::tanh(v[i]);
      break;
    case Act::Sigmoid:
      for (size_t i = 0; i < v.size(); ++i) out[i] = T(1) / (T(1) + std::exp(-v[i]));
      break;
  }
  auto in = x;
  return Tensor<T>::make_op(
      x.shape(), std::move(out), act_name(kind), {x}, [in, kind, alpha](auto& node) mutable {
        if (!in.requires_grad()) return;
        const T* dy = node.grad.data();
        const T* y = node.value.data();
        const T* xv = in.values().data();
        T* dx = in.grad().data();
        const size_t n = node.value.size();
        switch (kind) {
          case Act::ReLU:
            // Subgradient at 0 is 0.
            for (size_t i = 0; i < n; ++i) dx[i] += xv[i] > T(0) ? dy[i] : T(0);
            break;
          case Act::LeakyReLU:
            for (size_t i = 0; i < n; ++i) dx[i] += xv[i] > T(0) ? dy[i] : alpha * dy[i];
            break;
          case Act::Tanh:
            for (size_t i = 0; i < n; ++i) dx[i] += dy[i] * (T(1) - y[i] * y[i]);
            break;
          case Act::Sigmoid:
            for (size_t i = 0; i < n; ++i) dx[i] += dy[i] * y[i] * (T(1) - y[i]);
            break;
        }
      });
}

template <typename T>
Tensor<T> dense(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b) {
  require(x.ndim() == 2, "dense: input must be 2-D, got " + shape_str(x.shape()));
  require(w.ndim() == 2, "dense: weight must be 2-D, got " + shape_str(w.shape()));
  const int N = x.dim(0), F = x.dim(1), G = w.dim(1);
  require(w.dim(0) == F, "dense: input " + shape_str(x.shape()) + " does not match weight " +
                             shape_str(w.shape()));
  require(static_cast<int>(b.numel()) == G, "dense: bias " + shape_str(b.shape()) +
                                                " does not match weight " + shape_str(w.shape()));
  std::vector<T> out(static_cast<size_t>(N) * G);
  gemm_nn(N, G, F, x.values().data(), w.values().data(), out.data(), false);
  const T* bp = b.values().data();
  for (int n = 0; n < N; ++n)
    for (int g = 0; g < G; ++g) out[static_cast<size_t>(n) * G + g] += bp[g];

  auto xi = x;
  auto wi = w;
  auto bi = b;
  return Tensor<T>::make_op(
      {N, G}, std::move(out), "dense", {x, w, b}, [xi, wi, bi, N, F, G](auto& node) mutable {
        const T* dy = node.grad.data();
        if (xi.requires_grad())
          gemm_nt(N, F, G, dy, wi.values().data(), xi.grad().data(), true);
        if (wi.requires_grad())
          gemm_tn(F, G, N, xi.values().data(), dy, wi.grad().data(), true);
        if (bi.requires_grad()) {
          T* db = bi.grad().data();
          for (int n = 0; n < N; ++n)
            for (int g = 0; g < G; ++g) db[g] += dy[static_cast<size_t>(n) * G + g];
        }
      });
}

template <typename T>
Tensor<T> reshape(const Tensor<T>& x, Shape shape) {
  require(shape_numel(shape) == x.numel(), "reshape: cannot view " + shape_str(x.shape()) +
                                               " as " + shape_str(shape));
  auto in = x;
  return Tensor<T>::make_op(std::move(shape), x.values(), "reshape", {x}, [in](auto& node) mutable {
    if (!in.requires_grad()) return;
    T* dx = in.grad().data();
    const T* dy = node.grad.data();
    for (size_t i = 0; i < node.grad.size(); ++i) dx[i] += dy[i];
  });
}

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  require(a.shape() == b.shape(), "add: shape mismatch " + shape_str(a.shape()) + " vs " +
                                      shape_str(b.shape()));
  std::vector<T> out(a.numel());
  for (size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] + b.values()[i];
  auto ai = a;
  auto bi = b;
  return Tensor<T>::make_op(a.shape(), std::move(out), "add", {a, b}, [ai, bi](auto& node) mutable {
    const T* dy = node.grad.data();
    if (ai.requires_grad()) {
      T* da = ai.grad().data();
      for (size_t i = 0; i < node.grad.size(); ++i) da[i] += dy[i];
    }
    if (bi.requires_grad()) {
      T* db = bi.grad().data();
      for (size_t i = 0; i < node.grad.size(); ++i) db[i] += dy[i];
    }
  });
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  require(a.shape() == b.shape(), "mul: shape mismatch " + shape_str(a.shape()) + " vs " +
                                      shape_str(b.shape()));
  std::vector<T> out(a.numel());
  for (size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] * b.values()[i];
  auto ai = a;
  auto bi = b;
  return Tensor<T>::make_op(a.shape(), std::move(out), "mul", {a, b}, [ai, bi](auto& node) mutable {
    const T* dy = node.grad.data();
    if (ai.requires_grad()) {
      T* da = ai.grad().data();
      for (size_t i = 0; i < node.grad.size(); ++i) da[i] += dy[i] * bi.values()[i];
    }
    if (bi.requires_grad()) {
      T* db = bi.grad().data();
      for (size_t i = 0; i < node.grad.size(); ++i) db[i] += dy[i] * ai.values()[i];
    }
  });
}

template <typename T>
Tensor<T> affine(const Tensor<T>& x, T scale, T shift) {
  std::vector<T> out(x.numel());
  for (size_t i = 0; i < out.size(); ++i) out[i] = scale * x.values()[i] + shift;
  auto in = x;
  return Tensor<T>::make_op(x.shape(), std::move(out), "affine", {x},
                            [in, scale](auto& node) mutable {
                              if (!in.requires_grad()) return;
                              T* dx = in.grad().data();
                              const T* dy = node.grad.data();
                              for (size_t i = 0; i < node.grad.size(); ++i)
                                dx[i] += scale * dy[i];
                            });
}

template <typename T>
Tensor<T> mean_all(const Tensor<T>& x) {
  double sum = 0;
  for (T v : x.values()) sum += v;
  const T inv_n = T(1) / static_cast<T>(x.numel());
  auto in = x;
  return Tensor<T>::make_op({1}, {static_cast<T>(sum / static_cast<double>(x.numel()))},
                            "mean", {x}, [in, inv_n](auto& node) mutable {
                              if (!in.requires_grad()) return;
                              const T dy = node.grad[0];
                              T* dx = in.grad().data();
                              for (size_t i = 0; i < in.numel(); ++i) dx[i] += dy * inv_n;
                            });
}

template <typename T>
Tensor<T> log_clamped(const Tensor<T>& x, T eps) {
  std::vector<T> out(x.numel());
  for (size_t i = 0; i < out.size(); ++i) out[i] = std::log(std::max(x.values()[i], eps));
  auto in = x;
  return Tensor<T>::make_op(x.shape(), std::move(out), "log", {x}, [in, eps](auto& node) mutable {
    if (!in.requires_grad()) return;
    const T* dy = node.grad.data();
    const T* xv = in.values().data();
    T* dx = in.grad().data();
    for (size_t i = 0; i < node.grad.size(); ++i) {
      if (xv[i] > eps) dx[i] += dy[i] / xv[i];
    }
  });
}

#define GANFORGE_OPS_INST(T)                                                               \
  template Tensor<T> conv2d<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, int, \
                               int);                                                      \
  template Tensor<T> conv_transpose2d<T>(const Tensor<T>&, const Tensor<T>&,              \
                                         const Tensor<T>&, int, int, int);                \
  template Tensor<T> batch_norm<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,  \
                                   std::vector<T>&, std::vector<T>&, bool, T, T);         \
  template Tensor<T> activate<T>(const Tensor<T>&, Act, T);                               \
  template Tensor<T> dense<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);      \
  template Tensor<T> reshape<T>(const Tensor<T>&, Shape);                                 \
  template Tensor<T> add<T>(const Tensor<T>&, const Tensor<T>&);                          \
  template Tensor<T> mul<T>(const Tensor<T>&, const Tensor<T>&);                          \
  template Tensor<T> affine<T>(const Tensor<T>&, T, T);                                   \
  template Tensor<T> mean_all<T>(const Tensor<T>&);                                       \
  template Tensor<T> log_clamped<T>(const Tensor<T>&, T);

GANFORGE_OPS_INST(float)
GANFORGE_OPS_INST(double)
#undef GANFORGE_OPS_INST

}  // namespace ganforge
