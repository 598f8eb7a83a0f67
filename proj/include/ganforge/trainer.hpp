#pragma once

#include <deque>
#include <functional>
#include <memory>
#include <string>

#include "ganforge/checkpoint.hpp"
#include "ganforge/config.hpp"
#include "ganforge/dataset.hpp"
#include "ganforge/models.hpp"
#include "ganforge/optimizer.hpp"
#include "ganforge/schedule.hpp"

namespace ganforge {

// Source of real image batches. Index-addressed so the training cursor can
// be serialized as (epoch, batch index) and the shuffle replayed on resume.
template <typename T>
class BatchSource {
 public:
  virtual ~BatchSource() = default;
  virtual size_t size() const = 0;
  virtual Tensor<T> load(const std::vector<size_t>& indices) = 0;
};

template <typename T>
class ManifestBatchSource : public BatchSource<T> {
 public:
  explicit ManifestBatchSource(DatasetManifest manifest) : manifest_(std::move(manifest)) {}
  size_t size() const override { return manifest_.size(); }
  Tensor<T> load(const std::vector<size_t>& indices) override {
    return load_batch<T>(manifest_, indices);
  }

 private:
  DatasetManifest manifest_;
};

// Holds a [N,3,R,R] tensor of prepared images; used by tests and toy runs.
template <typename T>
class MemoryBatchSource : public BatchSource<T> {
 public:
  explicit MemoryBatchSource(Tensor<T> images) : images_(std::move(images)) {}
  size_t size() const override { return static_cast<size_t>(images_.dim(0)); }
  Tensor<T> load(const std::vector<size_t>& indices) override;

 private:
  Tensor<T> images_;
};

struct StepLog {
  long step = 0;
  double d_loss = 0.0;
  double g_loss = 0.0;
  ExtraTarget extra = ExtraTarget::None;
  std::string guard;  // divergence-guard token for this step
};

std::string checkpoint_path(const std::string& dir, long step);

// The adversarial loop: per step one D update then one G update (plus the
// scheduled extra, or the block-mode variant where the inactive network is
// evaluated without an update so both loss columns stay populated). Fresh
// z ~ Uniform[-1,1]^dim per phase from the session's own rng stream.
template <typename T>
class TrainSession {
 public:
  TrainSession(const RunConfig& cfg, BatchSource<T>& data);
  TrainSession(const RunConfig& cfg, BatchSource<T>& data, const Checkpoint<T>& ckpt);

  // Runs from the current step up to cfg.total_steps, invoking `on_step`
  // after every completed step. Writes checkpoints into cfg.checkpoint_dir
  // (when set) every checkpoint_interval steps and at exit. With
  // halt_on_warn, stops after the first step whose guard status is not ok.
  void run(const std::function<void(const StepLog&)>& on_step);

  long step() const { return step_; }
  int batch_size() const { return batch_; }
  Network<T>& generator() { return g_; }
  Network<T>& discriminator() { return d_; }
  Checkpoint<T> make_checkpoint();

 private:
  StepLog step_once();
  double d_phase(bool update);
  double g_phase(bool update);

  RunConfig cfg_;
  BatchSource<T>& data_;
  int batch_;
  Network<T> g_, d_;
  std::unique_ptr<Adam<T>> adam_g_, adam_d_;
  Rng latent_rng_;
  EpochIterator iter_;
  long step_ = 0;
  std::deque<LossRecord> history_;
};

extern template class MemoryBatchSource<float>;
extern template class MemoryBatchSource<double>;
extern template class TrainSession<float>;
extern template class TrainSession<double>;

}  // namespace ganforge
