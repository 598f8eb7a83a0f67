#include "ganforge/latent.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "ganforge/errors.hpp"

namespace ganforge {

void validate_latent(const LatentSpec& spec) {
  if (spec.dim < 1)
    throw ConfigError("latent dim must be >= 1, got " + std::to_string(spec.dim));
  if (!(spec.c > 0.0) || spec.c > 1.0)
    throw ConfigError("truncation bound must be in (0, 1], got " + std::to_string(spec.c));
}

template <typename T>
Tensor<T> sample_latent(int n, int dim, double c, Rng& rng) {
  validate_latent({dim, c, 0});
  if (n < 1) throw ConfigError("latent sample count must be >= 1, got " + std::to_string(n));
  std::vector<T> v(static_cast<size_t>(n) * dim);
  for (auto& x : v) x = static_cast<T>(rng.uniform(-c, c));
  return Tensor<T>({n, dim}, std::move(v), false);
}

template <typename T>
Tensor<T> sample_latent(int n, const LatentSpec& spec) {
  Rng rng(spec.seed);
  return sample_latent<T>(n, spec.dim, spec.c, rng);
}

uint8_t denormalize_pixel(double x) {
  const long v = std::lround((x + 1.0) * 127.5);
  return static_cast<uint8_t>(std::clamp(v, 0L, 255L));
}

template <typename T>
Image tile_grid(const Tensor<T>& batch, int rows, int cols) {
  if (batch.ndim() != 4 || batch.dim(1) != 3)
    throw ConfigError("tile_grid expects a [N,3,R,R] batch, got " + shape_str(batch.shape()));
  if (rows < 1 || cols < 1) throw ConfigError("grid must have at least one row and column");
  const int n = batch.dim(0);
  const int r = batch.dim(2);
  if (batch.dim(3) != r) throw ConfigError("tile_grid expects square samples");
  if (n > rows * cols)
    throw ConfigError("grid of " + std::to_string(rows) + "x" + std::to_string(cols) +
                      " cannot hold " + std::to_string(n) + " samples");
  Image img;
  img.width = cols * r;
  img.height = rows * r;
  img.pixels.assign(3u * static_cast<size_t>(img.width) * img.height, 0);
  const size_t plane = static_cast<size_t>(r) * r;
  for (int idx = 0; idx < n; ++idx) {
    const int cell_y = (idx / cols) * r;
    const int cell_x = (idx % cols) * r;
    for (int c = 0; c < 3; ++c) {
      const T* src = batch.values().data() + (static_cast<size_t>(idx) * 3 + c) * plane;
      for (int y = 0; y < r; ++y) {
        for (int x = 0; x < r; ++x) {
          const size_t px = static_cast<size_t>(cell_y + y) * img.width + (cell_x + x);
          img.pixels[3 * px + c] = denormalize_pixel(static_cast<double>(src[y * r + x]));
        }
      }
    }
  }
  return img;
}

template <typename T>
Image render_grid(Network<T>& g, int rows, int cols, double c, uint64_t seed) {
  Rng rng(seed);
  auto z = sample_latent<T>(rows * cols, g.spec().latent_dim, c, rng);
  return tile_grid(g.forward(z, false), rows, cols);
}

namespace {

template <typename T>
TruncationStats stats_of(double bound, const Tensor<T>& out) {
  const int n = out.dim(0);
  const size_t per = out.numel() / static_cast<size_t>(n);
  const T* v = out.values().data();

  double var_sum = 0.0;
  for (size_t e = 0; e < per; ++e) {
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += v[i * per + e];
    mean /= n;
    double var = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = v[i * per + e] - mean;
      var += d * d;
    }
    var_sum += var / n;
  }

  double d_sum = 0.0, d2_sum = 0.0;
  size_t pairs = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double acc = 0.0;
      for (size_t e = 0; e < per; ++e) {
        const double d = static_cast<double>(v[i * per + e]) - v[j * per + e];
        acc += d * d;
      }
      const double rms = std::sqrt(acc / static_cast<double>(per));
      d_sum += rms;
      d2_sum += rms * rms;
      ++pairs;
    }
  }
  const double mean_d = d_sum / static_cast<double>(pairs);

  TruncationStats s;
  s.bound = bound;
  s.pixel_variance = var_sum / static_cast<double>(per);
  s.mean_pairwise_distance = mean_d;
  s.distance_stddev = std::sqrt(std::max(0.0, d2_sum / static_cast<double>(pairs) - mean_d * mean_d));
  s.n_samples = n;
  return s;
}

template <typename T>
Tensor<T> generate_arm(Network<T>& g, double c, int n, uint64_t seed) {
  Rng rng(seed);
  auto z = sample_latent<T>(n, g.spec().latent_dim, c, rng);
  return g.forward(z, false);
}

}  // namespace

template <typename T>
TruncationStats truncation_stats(Network<T>& g, double c, int n, uint64_t seed) {
  if (n < 2) throw ConfigError("truncation statistics need at least 2 samples");
  return stats_of(c, generate_arm(g, c, n, seed));
}

template <typename T>
TruncationReport compare_truncation(Network<T>& g, double c1, double c2, int n, uint64_t seed,
                                    const std::string& out_dir) {
  validate_latent({g.spec().latent_dim, c1, 0});
  validate_latent({g.spec().latent_dim, c2, 0});
  if (!(c1 > c2))
    throw ConfigError("compare_truncation requires c1 > c2, got c1 = " + std::to_string(c1) +
                      ", c2 = " + std::to_string(c2));
  if (n < 2) throw ConfigError("compare_truncation needs at least 2 samples per arm");

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError(out_dir + ": cannot create directory: " + ec.message());

  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  const int rows = (n + cols - 1) / cols;

  TruncationReport report;
  const double bounds[2] = {c1, c2};
  for (int arm = 0; arm < 2; ++arm) {
    auto out = generate_arm(g, bounds[arm], n, seed);
    auto stats = stats_of(bounds[arm], out);
    write_ppm(out_dir + "/grid_bound_" + std::to_string(arm + 1) + ".ppm",
              tile_grid(out, rows, cols));
    (arm == 0 ? report.first : report.second) = stats;
  }
  return report;
}

#define GANFORGE_LATENT_INST(T)                                                      \
  template Tensor<T> sample_latent<T>(int, int, double, Rng&);                      \
  template Tensor<T> sample_latent<T>(int, const LatentSpec&);                      \
  template Image tile_grid<T>(const Tensor<T>&, int, int);                          \
  template Image render_grid<T>(Network<T>&, int, int, double, uint64_t);           \
  template TruncationStats truncation_stats<T>(Network<T>&, double, int, uint64_t); \
  template TruncationReport compare_truncation<T>(Network<T>&, double, double, int, \
                                                  uint64_t, const std::string&);

GANFORGE_LATENT_INST(float)
GANFORGE_LATENT_INST(double)
#undef GANFORGE_LATENT_INST

}  // namespace ganforge
