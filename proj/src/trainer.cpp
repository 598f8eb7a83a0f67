#include "ganforge/trainer.hpp"

#include <algorithm>
#include <filesystem>

#include "ganforge/latent.hpp"
#include "ganforge/losses.hpp"

namespace ganforge {

template <typename T>
Tensor<T> MemoryBatchSource<T>::load(const std::vector<size_t>& indices) {
  const size_t per = images_.numel() / static_cast<size_t>(images_.dim(0));
  std::vector<T> out(indices.size() * per);
  for (size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= size())
      throw ConfigError("batch index " + std::to_string(indices[k]) + " out of range");
    const T* src = images_.values().data() + indices[k] * per;
    std::copy(src, src + per, out.data() + k * per);
  }
  Shape shape = images_.shape();
  shape[0] = static_cast<int>(indices.size());
  return Tensor<T>(std::move(shape), std::move(out), false);
}

std::string checkpoint_path(const std::string& dir, long step) {
  return dir + "/ckpt_step" + std::to_string(step) + ".gfc";
}

namespace {

AdamConfig adam_config_of(const RunConfig& cfg) {
  AdamConfig a;
  a.learning_rate = cfg.learning_rate;
  a.beta1 = cfg.beta1;
  a.beta2 = cfg.beta2;
  return a;
}

}  // namespace

template <typename T>
TrainSession<T>::TrainSession(const RunConfig& cfg, BatchSource<T>& data)
    : cfg_(cfg),
      data_(data),
      batch_(scheduled_batch(cfg)),
      g_(build_generator<T>(cfg.resolution, cfg.latent_dim, cfg.width_multiplier)),
      d_(build_discriminator<T>(cfg.resolution, cfg.width_multiplier)),
      latent_rng_(derive_seed(cfg.seed, 2)),
      iter_(data.size(), static_cast<size_t>(batch_), derive_seed(cfg.seed, 3)) {
  init_params(g_, derive_seed(cfg.seed, 0));
  init_params(d_, derive_seed(cfg.seed, 1));
  adam_g_ = std::make_unique<Adam<T>>(g_.params(), adam_config_of(cfg));
  adam_d_ = std::make_unique<Adam<T>>(d_.params(), adam_config_of(cfg));
}

template <typename T>
TrainSession<T>::TrainSession(const RunConfig& cfg, BatchSource<T>& data,
                              const Checkpoint<T>& ckpt)
    : cfg_(cfg),
      data_(data),
      batch_(scheduled_batch(cfg)),
      g_(network_from_snapshot(ckpt.gen)),
      d_(network_from_snapshot(ckpt.disc)),
      latent_rng_(0),
      iter_(data.size(), static_cast<size_t>(batch_), derive_seed(cfg.seed, 3)) {
  const auto want_g = generator_spec(cfg.resolution, cfg.latent_dim, cfg.width_multiplier);
  const auto want_d = discriminator_spec(cfg.resolution, cfg.width_multiplier);
  if (!(ckpt.gen.spec == want_g) || !(ckpt.disc.spec == want_d))
    throw ConfigError(
        "checkpoint architecture does not match the config (resolution, width multiplier and "
        "latent dim must be unchanged for resume)");
  adam_g_ = std::make_unique<Adam<T>>(g_.params(), adam_config_of(cfg));
  adam_d_ = std::make_unique<Adam<T>>(d_.params(), adam_config_of(cfg));
  restore_adam(*adam_g_, ckpt.adam_g);
  restore_adam(*adam_d_, ckpt.adam_d);
  latent_rng_.set_state(ckpt.cursor.rng_state);
  iter_.seek(ckpt.cursor.data_epoch, ckpt.cursor.data_batch_index);
  step_ = ckpt.cursor.step;
  history_.assign(ckpt.history.begin(), ckpt.history.end());
}

template <typename T>
double TrainSession<T>::d_phase(bool update) {
  const auto indices = iter_.next();
  const auto real = data_.load(indices);
  auto z = sample_latent<T>(real.dim(0), cfg_.latent_dim, 1.0, latent_rng_);
  const auto fake = g_.forward(z, true).detach();
  auto loss = d_loss(d_.forward(real, true), d_.forward(fake, true));
  if (update) {
    g_.zero_grad();
    d_.zero_grad();
    loss.backward();
    adam_d_->step();
  }
  return static_cast<double>(loss.item());
}

template <typename T>
double TrainSession<T>::g_phase(bool update) {
  auto z = sample_latent<T>(batch_, cfg_.latent_dim, 1.0, latent_rng_);
  auto loss = g_loss(d_.forward(g_.forward(z, true), true), cfg_.g_loss_mode);
  if (update) {
    g_.zero_grad();
    d_.zero_grad();
    loss.backward();
    adam_g_->step();
  }
  return static_cast<double>(loss.item());
}

template <typename T>
StepLog TrainSession<T>::step_once() {
  const long s = step_ + 1;
  const UpdatePlan plan = plan_for(cfg_.schedule_mode, s, cfg_.alt_interval);

  double dl, gl;
  if (cfg_.schedule_mode == ScheduleMode::ExtraInterval) {
    dl = d_phase(true);
    gl = g_phase(true);
    if (plan.extra == ExtraTarget::D) dl = d_phase(true);
    if (plan.extra == ExtraTarget::G) gl = g_phase(true);
  } else {
    dl = d_phase(plan.d_updates > 0);
    gl = g_phase(plan.g_updates > 0);
  }
  step_ = s;

  history_.push_back({s, dl, gl});
  const size_t keep = std::max<size_t>(4 * static_cast<size_t>(cfg_.guard_window), 64);
  while (history_.size() > keep) history_.pop_front();

  const GuardStatus status =
      divergence_guard(history_, {cfg_.d_loss_band, cfg_.g_loss_band}, cfg_.guard_window);
  return {s, dl, gl, plan.extra, status.str()};
}

template <typename T>
Checkpoint<T> TrainSession<T>::make_checkpoint() {
  Checkpoint<T> ckpt;
  ckpt.config_text = cfg_.source_text;
  ckpt.gen = snapshot_network(g_);
  ckpt.disc = snapshot_network(d_);
  ckpt.adam_g = snapshot_adam(*adam_g_);
  ckpt.adam_d = snapshot_adam(*adam_d_);
  ckpt.cursor.step = step_;
  ckpt.cursor.rng_state = latent_rng_.state();
  ckpt.cursor.data_epoch = iter_.epoch();
  ckpt.cursor.data_batch_index = iter_.batch_index();
  ckpt.history.assign(history_.begin(), history_.end());
  return ckpt;
}

template <typename T>
void TrainSession<T>::run(const std::function<void(const StepLog&)>& on_step) {
  const bool persist = !cfg_.checkpoint_dir.empty();
  if (persist) {
    std::error_code ec;
    std::filesystem::create_directories(cfg_.checkpoint_dir, ec);
    if (ec) throw IoError(cfg_.checkpoint_dir + ": cannot create directory: " + ec.message());
  }
  while (step_ < cfg_.total_steps) {
    const StepLog log = step_once();
    if (on_step) on_step(log);
    const bool warned = log.guard != "ok";
    const bool stop = (cfg_.halt_on_warn && warned) || step_ == cfg_.total_steps;
    if (persist && (step_ % cfg_.checkpoint_interval == 0 || stop))
      save_checkpoint(checkpoint_path(cfg_.checkpoint_dir, step_), make_checkpoint());
    if (cfg_.halt_on_warn && warned) break;
  }
}

template class MemoryBatchSource<float>;
template class MemoryBatchSource<double>;
template class TrainSession<float>;
template class TrainSession<double>;

}  // namespace ganforge
