#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ganforge/image_io.hpp"
#include "ganforge/models.hpp"
#include "ganforge/rng.hpp"
#include "ganforge/tensor.hpp"

namespace ganforge {

struct LatentSpec {
  int dim = 100;
  double c = 1.0;  // coordinates drawn from Uniform[-c, c]
  uint64_t seed = 0;
};

// Throws ConfigError unless dim >= 1 and 0 < c <= 1.
void validate_latent(const LatentSpec& spec);

// n x dim matrix of i.i.d. Uniform[-c, c] draws. The truncated distribution
// is sampled directly from the smaller interval; coordinates scale linearly
// with c for a fixed rng stream, so arms of a comparison sharing a seed
// differ only by that scale.
template <typename T>
Tensor<T> sample_latent(int n, int dim, double c, Rng& rng);

template <typename T>
Tensor<T> sample_latent(int n, const LatentSpec& spec);

// [-1,1] -> [0,255] by round((x+1)*127.5), clamped;ends map exactly to 0,
// 128 and 255.
uint8_t denormalize_pixel(double x);

// Tiles a [N,3,R,R] batch (values in [-1,1]) into a (rows*R) x (cols*R)
// image, row-major; cells past N stay black.
template <typename T>
Image tile_grid(const Tensor<T>& batch, int rows, int cols);

// rows*cols samples from G under bound c, tiled. Deterministic in
// (G parameters, seed, rows, cols).
template <typename T>
Image render_grid(Network<T>& g, int rows, int cols, double c, uint64_t seed);

struct TruncationStats {
  double bound = 0.0;
  // Across-sample variance per output element, averaged over elements.
  double pixel_variance = 0.0;
  // Mean over sample pairs of the RMS distance in [-1,1] output space.
  double mean_pairwise_distance = 0.0;
  double distance_stddev = 0.0;  // spread of the pair distances
  int n_samples = 0;
};

struct TruncationReport {
  TruncationStats first;   // bound c1
  TruncationStats second;  // bound c2
};

template <typename T>
TruncationStats truncation_stats(Network<T>& g, double c, int n, uint64_t seed);

// Shared-seed two-arm comparison (requires c1 > c2): emits one grid image
// per bound into out_dir (grid_bound_1.ppm, grid_bound_2.ppm) and returns
// the per-bound statistics.
template <typename T>
TruncationReport compare_truncation(Network<T>& g, double c1, double c2, int n, uint64_t seed,
                                    const std::string& out_dir);

#define GANFORGE_LATENT_DECL(T)                                                             \
  extern template Tensor<T> sample_latent<T>(int, int, double, Rng&);                      \
  extern template Tensor<T> sample_latent<T>(int, const LatentSpec&);                      \
  extern template Image tile_grid<T>(const Tensor<T>&, int, int);                          \
  extern template Image render_grid<T>(Network<T>&, int, int, double, uint64_t);           \
  extern template TruncationStats truncation_stats<T>(Network<T>&, double, int, uint64_t); \
  extern template TruncationReport compare_truncation<T>(Network<T>&, double, double, int, \
                                                         uint64_t, const std::string&);

GANFORGE_LATENT_DECL(float)
GANFORGE_LATENT_DECL(double)
#undef GANFORGE_LATENT_DECL

}  // namespace ganforge
