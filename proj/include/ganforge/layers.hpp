#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ganforge/ops.hpp"

namespace ganforge {

template <typename T>
struct ParamRef {
  std::string name;
  Tensor<T> tensor;
};

// Non-trainable per-layer state (batch-norm running stats). Pointers stay
// valid for the lifetime of the owning network.
template <typename T>
struct BufferRef {
  std::string name;
  std::vector<T>* data;
};

template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;
  virtual Tensor<T> forward(const Tensor<T>& x, bool train) = 0;
  virtual void collect(const std::string& prefix, std::vector<ParamRef<T>>& params,
                       std::vector<BufferRef<T>>& buffers) {
    (void)prefix;
    (void)params;
    (void)buffers;
  }
  virtual std::string kind() const = 0;
};

template <typename T>
class DenseLayer : public Layer<T> {
 public:
  DenseLayer(int in_features, int out_features)
      : weight(Tensor<T>::zeros({in_features, out_features}, true)),
        bias(Tensor<T>::zeros({out_features}, true)) {}

  Tensor<T> forward(const Tensor<T>& x, bool) override { return dense(x, weight, bias); }
  void collect(const std::string& prefix, std::vector<ParamRef<T>>& params,
               std::vector<BufferRef<T>>&) override {
    params.push_back({prefix + ".weight", weight});
    params.push_back({prefix + ".bias", bias});
  }
  std::string kind() const override { return "dense"; }

  Tensor<T> weight, bias;
};

// Reshapes [N, ...] to [N, dims...]; the batch extent passes through.
template <typename T>
class ReshapeLayer : public Layer<T> {
 public:
  explicit ReshapeLayer(Shape dims) : dims_(std::move(dims)) {}
  Tensor<T> forward(const Tensor<T>& x, bool) override {
    Shape s{x.dim(0)};
    s.insert(s.end(), dims_.begin(), dims_.end());
    return reshape(x, s);
  }
  std::string kind() const override { return "reshape"; }

 private:
  Shape dims_;
};

template <typename T>
class FlattenLayer : public Layer<T> {
 public:
  Tensor<T> forward(const Tensor<T>& x, bool) override {
    const int n = x.dim(0);
    return reshape(x, {n, static_cast<int>(x.numel()) / n});
  }
  std::string kind() const override { return "flatten"; }
};

template <typename T>
class Conv2dLayer : public Layer<T> {
 public:
  Conv2dLayer(int cin, int cout, int k, int stride, int pad)
      : weight(Tensor<T>::zeros({cout, cin, k, k}, true)),
        bias(Tensor<T>::zeros({cout}, true)),
        stride_(stride),
        pad_(pad) {}

  Tensor<T> forward(const Tensor<T>& x, bool) override {
    return conv2d(x, weight, bias, stride_, pad_);
  }
  void collect(const std::string& prefix, std::vector<ParamRef<T>>& params,
               std::vector<BufferRef<T>>&) override {
    params.push_back({prefix + ".weight", weight});
    params.push_back({prefix + ".bias", bias});
  }
  std::string kind() const override { return "conv"; }

  Tensor<T> weight, bias;

 private:
  int stride_, pad_;
};

template <typename T>
class ConvTranspose2dLayer : public Layer<T> {
 public:
  ConvTranspose2dLayer(int cin, int cout, int k, int stride, int pad, int out_pad)
      : weight(Tensor<T>::zeros({cin, cout, k, k}, true)),
        bias(Tensor<T>::zeros({cout}, true)),
        stride_(stride),
        pad_(pad),
        out_pad_(out_pad) {}

  Tensor<T> forward(const Tensor<T>& x, bool) override {
    return conv_transpose2d(x, weight, bias, stride_, pad_, out_pad_);
  }
  void collect(const std::string& prefix, std::vector<ParamRef<T>>& params,
               std::vector<BufferRef<T>>&) override {
    params.push_back({prefix + ".weight", weight});
    params.push_back({prefix + ".bias", bias});
  }
  std::string kind() const override { return "convt"; }

  Tensor<T> weight, bias;

 private:
  int stride_, pad_, out_pad_;
};

template <typename T>
class BatchNorm2dLayer : public Layer<T> {
 public:
  explicit BatchNorm2dLayer(int channels, T momentum = T(0.9), T eps = T(1e-5))
      : gamma(Tensor<T>::full({channels}, T(1), true)),
        beta(Tensor<T>::zeros({channels}, true)),
        running_mean(channels, T(0)),
        running_var(channels, T(1)),
        momentum_(momentum),
        eps_(eps) {}

  Tensor<T> forward(const Tensor<T>& x, bool train) override {
    return batch_norm(x, gamma, beta, running_mean, running_var, train, momentum_, eps_);
  }
  void collect(const std::string& prefix, std::vector<ParamRef<T>>& params,
               std::vector<BufferRef<T>>& buffers) override {
    params.push_back({prefix + ".gamma", gamma});
    params.push_back({prefix + ".beta", beta});
    buffers.push_back({prefix + ".running_mean", &running_mean});
    buffers.push_back({prefix + ".running_var", &running_var});
  }
  std::string kind() const override { return "bn"; }

  Tensor<T> gamma, beta;
  std::vector<T> running_mean, running_var;

 private:
  T momentum_, eps_;
};

template <typename T>
class ActivationLayer : public Layer<T> {
 public:
  explicit ActivationLayer(Act act, T alpha = T(0)) : act_(act), alpha_(alpha) {}
  Tensor<T> forward(const Tensor<T>& x, bool) override { return activate(x, act_, alpha_); }
  std::string kind() const override { return act_name(act_); }

 private:
  Act act_;
  T alpha_;
};

extern template class DenseLayer<float>;
extern template class DenseLayer<double>;
extern template class Conv2dLayer<float>;
extern template class Conv2dLayer<double>;
extern template class ConvTranspose2dLayer<float>;
extern template class ConvTranspose2dLayer<double>;
extern template class BatchNorm2dLayer<float>;
extern template class BatchNorm2dLayer<double>;

}  // namespace ganforge
