#include "ganforge/models.hpp"

#include <algorithm>
#include <cmath>

namespace ganforge {

namespace {

std::string valid_resolution_list() {
  std::vector<int> rs;
  for (int base : {4, 6})
    for (int r = base * 2; r <= 1024; r *= 2) rs.push_back(r);
  std::sort(rs.begin(), rs.end());
  std::string out;
  for (int r : rs) {
    if (!out.empty()) out += ", ";
    out += std::to_string(r);
  }
  return out;
}

}  // namespace

std::pair<int, int> resolve_stages(int target_resolution) {
  for (int base : {4, 6}) {
    int r = target_resolution;
    int stages = 0;
    while (r > base && r % 2 == 0) {
      r /= 2;
      ++stages;
    }
    if (r == base && stages >= 1) return {base, stages};
  }
  throw ConfigError("resolution " + std::to_string(target_resolution) +
                    " is not base*2^L with base in {4, 6}; valid resolutions up to 1024: " +
                    valid_resolution_list());
}

std::vector<int> channel_schedule(int stages, double width_multiplier) {
  if (stages < 1) throw ConfigError("channel_schedule: need at least one stage");
  if (width_multiplier <= 0) throw ConfigError("width_multiplier must be > 0");
  std::vector<int> out(static_cast<size_t>(stages));
  for (int i = 0; i < stages; ++i) {
    const int full = std::max(1024 >> i, 8);
    out[static_cast<size_t>(i)] =
        std::max<int>(1, static_cast<int>(std::lround(full * width_multiplier)));
  }
  return out;
}

NetworkSpec generator_spec(int target_resolution, int latent_dim, double width_multiplier) {
  if (latent_dim < 1) throw ConfigError("latent_dim must be >= 1");
  auto [base, stages] = resolve_stages(target_resolution);
  NetworkSpec spec;
  spec.role = NetRole::Generator;
  spec.target_resolution = target_resolution;
  spec.base_spatial = base;
  spec.latent_dim = latent_dim;
  spec.channels = channel_schedule(stages, width_multiplier);
  return spec;
}

NetworkSpec discriminator_spec(int target_resolution, double width_multiplier) {
  auto [base, stages] = resolve_stages(target_resolution);
  NetworkSpec spec;
  spec.role = NetRole::Discriminator;
  spec.target_resolution = target_resolution;
  spec.base_spatial = base;
  spec.latent_dim = 0;
  spec.channels = channel_schedule(stages, width_multiplier);
  return spec;
}

template <typename T>
Network<T> build_from_spec(const NetworkSpec& spec) {
  const int L = spec.num_stages();
  const int k = spec.kernel;
  const int s = spec.stride;
  const int pad = k / 2;
  const auto& cs = spec.channels;
  Network<T> net(spec);

  if (spec.role == NetRole::Generator) {
    const int out_pad = transpose_out_pad_for(2 * spec.base_spatial, k, s, pad);
    net.add(std::make_unique<DenseLayer<T>>(spec.latent_dim,
                                            cs[0] * spec.base_spatial * spec.base_spatial));
    net.add(std::make_unique<ReshapeLayer<T>>(Shape{cs[0], spec.base_spatial, spec.base_spatial}));
    net.add(std::make_unique<BatchNorm2dLayer<T>>(cs[0]));
    net.add(std::make_unique<ActivationLayer<T>>(Act::ReLU));
    for (int i = 1; i <= L; ++i) {
      const int cin = cs[static_cast<size_t>(i - 1)];
      const int cout = i == L ? 3 : cs[static_cast<size_t>(i)];
      net.add(std::make_unique<ConvTranspose2dLayer<T>>(cin, cout, k, s, pad, out_pad));
      if (i < L) {
        net.add(std::make_unique<BatchNorm2dLayer<T>>(cout));
        net.add(std::make_unique<ActivationLayer<T>>(Act::ReLU));
      } else {
        net.add(std::make_unique<ActivationLayer<T>>(Act::Tanh));
      }
    }
  } else {
    const T leak = T(0.2);
    for (int i = 1; i <= L; ++i) {
      const int cin = i == 1 ? 3 : cs[static_cast<size_t>(L - i + 1)];
      const int cout = cs[static_cast<size_t>(L - i)];
      net.add(std::make_unique<Conv2dLayer<T>>(cin, cout, k, s, pad));
      if (i > 1) net.add(std::make_unique<BatchNorm2dLayer<T>>(cout));
      net.add(std::make_unique<ActivationLayer<T>>(Act::LeakyReLU, leak));
    }
    net.add(std::make_unique<FlattenLayer<T>>());
    net.add(std::make_unique<DenseLayer<T>>(cs[0] * spec.base_spatial * spec.base_spatial, 1));
    net.add(std::make_unique<ActivationLayer<T>>(Act::Sigmoid));
  }
  return net;
}

template <typename T>
Network<T> build_generator(int target_resolution, int latent_dim, double width_multiplier) {
  return build_from_spec<T>(generator_spec(target_resolution, latent_dim, width_multiplier));
}

template <typename T>
Network<T> build_discriminator(int target_resolution, double width_multiplier) {
  return build_from_spec<T>(discriminator_spec(target_resolution, width_multiplier));
}

template <typename T>
void init_params(Network<T>& net, uint64_t seed) {
  Rng rng(seed);
  for (auto& p : net.params()) {
    auto& v = p.tensor.values();
    if (p.name.ends_with(".weight")) {
      for (auto& x : v) x = static_cast<T>(rng.gaussian(0.0, 0.02));
    } else if (p.name.ends_with(".gamma")) {
      for (auto& x : v) x = static_cast<T>(rng.gaussian(1.0, 0.02));
    } else {
      std::fill(v.begin(), v.end(), T(0));
    }
    p.tensor.zero_grad();
  }
  for (auto& b : net.buffers()) {
    const T fill = b.name.ends_with(".running_var") ? T(1) : T(0);
    std::fill(b.data->begin(), b.data->end(), fill);
  }
}

template class Network<float>;
template class Network<double>;
template Network<float> build_from_spec<float>(const NetworkSpec&);
template Network<double> build_from_spec<double>(const NetworkSpec&);
template Network<float> build_generator<float>(int, int, double);
template Network<double> build_generator<double>(int, int, double);
template Network<float> build_discriminator<float>(int, double);
template Network<double> build_discriminator<double>(int, double);
template void init_params<float>(Network<float>&, uint64_t);
template void init_params<double>(Network<double>&, uint64_t);

}  // namespace ganforge
