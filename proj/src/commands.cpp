#include "ganforge/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <memory>

#include "ganforge/checkpoint.hpp"
#include "ganforge/config.hpp"
#include "ganforge/dataset.hpp"
#include "ganforge/errors.hpp"
#include "ganforge/gradcheck.hpp"
#include "ganforge/latent.hpp"
#include "ganforge/trainer.hpp"

namespace ganforge {

namespace {

// fopen wrapper that closes on scope exit and reports failures with path.
class File {
 public:
  File(const std::string& path, const char* mode) : path_(path), f_(std::fopen(path.c_str(), mode)) {
    if (!f_) throw IoError(path + ": cannot open");
  }
  ~File() {
    if (f_) std::fclose(f_);
  }
  File(const File&) = delete;
  File& operator=(const File&) = delete;

  std::FILE* get() { return f_; }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::FILE* f_;
};

template <typename T>
int run_train(const RunConfig& cfg, const std::string& resume_path) {
  auto manifest = ingest(cfg.data_dir, cfg.resolution);
  for (const auto& skip : manifest.skipped)
    std::fprintf(stderr, "skipping %s: %s\n", skip.path.c_str(), skip.reason.c_str());
  std::printf("dataset: %zu images, undersized_fraction=%.4g\n", manifest.size(),
              manifest.undersized_fraction());

  ManifestBatchSource<T> source(std::move(manifest));
  std::unique_ptr<TrainSession<T>> session;
  if (resume_path.empty()) {
    session = std::make_unique<TrainSession<T>>(cfg, source);
  } else {
    const auto ckpt = load_checkpoint<T>(resume_path);
    session = std::make_unique<TrainSession<T>>(cfg, source, ckpt);
    std::printf("resumed from %s at step %ld\n", resume_path.c_str(), session->step());
  }

  std::error_code ec;
  std::filesystem::create_directories(cfg.checkpoint_dir, ec);
  if (ec) throw IoError(cfg.checkpoint_dir + ": cannot create directory: " + ec.message());

  const std::string csv_path = cfg.checkpoint_dir + "/loss.csv";
  const bool append = !resume_path.empty() && std::filesystem::exists(csv_path);
  File csv(csv_path, append ? "ab" : "wb");
  if (!append) std::fprintf(csv.get(), "step,d_loss,g_loss,extra_target,guard_status\n");

  session->run([&](const StepLog& log) {
    std::fprintf(csv.get(), "%ld,%.17g,%.17g,%s,%s\n", log.step, log.d_loss, log.g_loss,
                 extra_target_name(log.extra).c_str(), log.guard.c_str());
    std::fflush(csv.get());
    if (log.guard != "ok")
      std::fprintf(stderr, "step %ld: divergence guard: %s\n", log.step, log.guard.c_str());
  });

  std::printf("finished at step %ld; loss log %s\n", session->step(), csv_path.c_str());
  return 0;
}

// Runs `fn` with the element type the checkpoint was written in.
template <typename Fn>
int with_checkpoint_precision(const std::string& path, Fn&& fn) {
  if (checkpoint_elem_size(path) == 4) return fn(float{});
  return fn(double{});
}

}  // namespace

int cmd_train(const std::string& config_path, const std::string& resume_path) {
  const RunConfig cfg = load_run_config(config_path);
  if (cfg.checkpoint_dir.empty())
    throw ConfigError(config_path + ": [run] checkpoint_dir is required for training");
  if (cfg.data_dir.empty())
    throw ConfigError(config_path + ": [data] dir is required for training");
  scheduled_batch(cfg);
  if (cfg.precision == Precision::F32) return run_train<float>(cfg, resume_path);
  return run_train<double>(cfg, resume_path);
}

int cmd_sample(const std::string& checkpoint_path, double truncation, int rows, int cols,
               const std::string& out_path, uint64_t seed) {
  if (rows < 1 || cols < 1) throw ConfigError("grid must have at least one row and column");
  return with_checkpoint_precision(checkpoint_path, [&](auto tag) {
    using T = decltype(tag);
    const auto ckpt = load_checkpoint<T>(checkpoint_path);
    auto g = network_from_snapshot(ckpt.gen);
    validate_latent({g.spec().latent_dim, truncation, seed});
    const Image img = render_grid(g, rows, cols, truncation, seed);
    write_ppm(out_path, img);
    std::printf("wrote %s (%dx%d)\n", out_path.c_str(), img.width, img.height);
    return 0;
  });
}

int cmd_compare_truncation(const std::string& checkpoint_path, double c1, double c2, int n,
                           const std::string& out_dir, uint64_t seed) {
  return with_checkpoint_precision(checkpoint_path, [&](auto tag) {
    using T = decltype(tag);
    const auto ckpt = load_checkpoint<T>(checkpoint_path);
    auto g = network_from_snapshot(ckpt.gen);
    const TruncationReport report = compare_truncation(g, c1, c2, n, seed, out_dir);

    File csv(out_dir + "/stats.csv", "wb");
    std::fprintf(csv.get(), "bound,pixel_variance,mean_pairwise_distance\n");
    for (const auto* s : {&report.first, &report.second})
      std::fprintf(csv.get(), "%.17g,%.17g,%.17g\n", s->bound, s->pixel_variance,
                   s->mean_pairwise_distance);

    std::printf("c=%.17g: pixel_variance=%.6g mean_pairwise_distance=%.6g\n", report.first.bound,
                report.first.pixel_variance, report.first.mean_pairwise_distance);
    std::printf("c=%.17g: pixel_variance=%.6g mean_pairwise_distance=%.6g\n", report.second.bound,
                report.second.pixel_variance, report.second.mean_pairwise_distance);
    return 0;
  });
}

int cmd_grad_check(const std::string& preset) {
  const GradCheckSuite suite = run_grad_check_suite(preset);
  for (const auto& c : suite.cases)
    std::printf("%-24s max_rel_error=%.6e tolerance=%.0e %s\n", c.op.c_str(), c.max_rel_error,
                c.tolerance, c.pass() ? "pass" : "FAIL");
  if (!suite.all_pass()) {
    std::fprintf(stderr, "gradient check failed\n");
    return 2;
  }
  return 0;
}

int cmd_dataset_scan(const std::string& dir, int resolution, const std::string& manifest_out) {
  const DatasetManifest manifest = ingest(dir, resolution);
  for (const auto& skip : manifest.skipped)
    std::printf("skipped %s: %s\n", skip.path.c_str(), skip.reason.c_str());
  size_t upscaled = 0;
  for (const auto& e : manifest.entries) upscaled += e.upscaled ? 1 : 0;
  std::printf("images=%zu skipped=%zu upscaled=%zu undersized_fraction=%.6g\n", manifest.size(),
              manifest.skipped.size(), upscaled, manifest.undersized_fraction());
  if (!manifest_out.empty()) {
    save_manifest_csv(manifest, manifest_out);
    std::printf("manifest written to %s\n", manifest_out.c_str());
  }
  return 0;
}

}  // namespace ganforge
