#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ganforge/layers.hpp"
#include "ganforge/rng.hpp"

namespace ganforge {

enum class NetRole : uint8_t { Generator = 0, Discriminator = 1 };

// Everything needed to rebuild a network's layer stack from a checkpoint.
// `channels` holds the interior widths c0..c(L-1): c0 sits at the base
// spatial size, and stage i of the generator maps c(i-1) -> c(i) channels
// (the last stage maps to 3 image channels). The discriminator mirrors the
// same list in reverse.
struct NetworkSpec {
  NetRole role = NetRole::Generator;
  int target_resolution = 0;
  int base_spatial = 0;
  int latent_dim = 0;  // generator only
  std::vector<int> channels;
  int kernel = 5;
  int stride = 2;

  int num_stages() const { return static_cast<int>(channels.size()); }
  bool operator==(const NetworkSpec&) const = default;
};

// Resolves target resolution R into (base, stages) with base in {4, 6},
// R == base * 2^stages and stages >= 1. Base 4 is preferred; 6 covers the
// 192-family. Throws ConfigError listing valid resolutions otherwise.
std::pair<int, int> resolve_stages(int target_resolution);

// Interior channel widths: width w scales a ladder that starts at 1024
// channels at the base spatial size and halves per doubling, floored at 8
// full-width channels (so at 8*w after scaling, but never below 1).
std::vector<int> channel_schedule(int stages, double width_multiplier);

template <typename T>
class Network {
 public:
  Network() = default;
  explicit Network(NetworkSpec spec) : spec_(std::move(spec)) {}

  void add(std::unique_ptr<Layer<T>> layer) { layers_.push_back(std::move(layer)); }

  Tensor<T> forward(const Tensor<T>& x, bool train) {
    Tensor<T> h = x;
    for (auto& l : layers_) h = l->forward(h, train);
    return h;
  }

  // Forward that also records every layer's output shape.
  Tensor<T> forward_trace(const Tensor<T>& x, bool train, std::vector<Shape>& shapes) {
    Tensor<T> h = x;
    shapes.clear();
    for (auto& l : layers_) {
      h = l->forward(h, train);
      shapes.push_back(h.shape());
    }
    return h;
  }

  std::vector<ParamRef<T>> params() {
    std::vector<ParamRef<T>> out;
    std::vector<BufferRef<T>> bufs;
    collect(out, bufs);
    return out;
  }

  std::vector<BufferRef<T>> buffers() {
    std::vector<ParamRef<T>> ps;
    std::vector<BufferRef<T>> out;
    collect(ps, out);
    return out;
  }

  size_t param_count() {
    size_t n = 0;
    for (const auto& p : params()) n += p.tensor.numel();
    return n;
  }

  void zero_grad() {
    for (auto& p : params()) p.tensor.zero_grad();
  }

  const NetworkSpec& spec() const { return spec_; }
  size_t num_layers() const { return layers_.size(); }
  const Layer<T>& layer(size_t i) const { return *layers_[i]; }

 private:
  void collect(std::vector<ParamRef<T>>& params, std::vector<BufferRef<T>>& buffers) {
    for (size_t i = 0; i < layers_.size(); ++i) {
      layers_[i]->collect("L" + std::to_string(i) + "." + layers_[i]->kind(), params, buffers);
    }
  }

  NetworkSpec spec_;
  std::vector<std::unique_ptr<Layer<T>>> layers_;
};

NetworkSpec generator_spec(int target_resolution, int latent_dim, double width_multiplier);
NetworkSpec discriminator_spec(int target_resolution, double width_multiplier);

// Instantiates the layer stack described by a spec; parameters start zeroed
// (weights) / identity (batch norm) until init_params runs.
template <typename T>
Network<T> build_from_spec(const NetworkSpec& spec);

// Ladder generator: dense projection to base x base x c0, then one k=5
// stride-2 transposed-conv doubling per stage, batch norm + ReLU everywhere
// except the tanh output stage.
template <typename T>
Network<T> build_generator(int target_resolution, int latent_dim, double width_multiplier);

// Spatial mirror: k=5 stride-2 convs halving down to the base size, leaky
// ReLU(0.2) throughout, no batch norm on the first stage, sigmoid head.
template <typename T>
Network<T> build_discriminator(int target_resolution, double width_multiplier);

// DCGAN-convention init: weights ~ N(0, 0.02), batch-norm gamma ~ N(1, 0.02),
// biases and betas zero, running stats reset. Deterministic in `seed`.
template <typename T>
void init_params(Network<T>& net, uint64_t seed);

extern template class Network<float>;
extern template class Network<double>;
extern template Network<float> build_from_spec<float>(const NetworkSpec&);
extern template Network<double> build_from_spec<double>(const NetworkSpec&);
extern template Network<float> build_generator<float>(int, int, double);
extern template Network<double> build_generator<double>(int, int, double);
extern template Network<float> build_discriminator<float>(int, double);
extern template Network<double> build_discriminator<double>(int, double);
extern template void init_params<float>(Network<float>&, uint64_t);
extern template void init_params<double>(Network<double>&, uint64_t);

}  // namespace ganforge
