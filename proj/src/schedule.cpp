#include "ganforge/schedule.hpp"

#include <algorithm>
#include <cmath>

namespace ganforge {

std::string extra_target_name(ExtraTarget t) {
  switch (t) {
    case ExtraTarget::None: return "none";
    case ExtraTarget::G: return "G";
    case ExtraTarget::D: return "D";
  }
  return "?";
}

ScheduleMode parse_schedule_mode(const std::string& name) {
  if (name == "extra_interval") return ScheduleMode::ExtraInterval;
  if (name == "block_alternation") return ScheduleMode::BlockAlternation;
  throw ConfigError("schedule_mode must be 'extra_interval' or 'block_alternation', got '" +
                    name + "'");
}

std::string schedule_mode_name(ScheduleMode mode) {
  return mode == ScheduleMode::ExtraInterval ? "extra_interval" : "block_alternation";
}

UpdatePlan plan_step(long step, int k) {
  if (step < 1) throw ConfigError("plan_step: step must be >= 1");
  if (k < 1) throw ConfigError("plan_step: interval k must be >= 1");
  UpdatePlan plan;
  if (step % k == 0) {
    const long trigger = step / k;  // 1-based index of this trigger event
    if (trigger % 2 == 1) {
      plan.extra = ExtraTarget::G;
      plan.g_updates = 2;
    } else {
      plan.extra = ExtraTarget::D;
      plan.d_updates = 2;
    }
  }
  return plan;
}

UpdatePlan plan_step_block(long step, int k) {
  if (step < 1) throw ConfigError("plan_step_block: step must be >= 1");
  if (k < 1) throw ConfigError("plan_step_block: interval k must be >= 1");
  const long block = (step - 1) / k;
  UpdatePlan plan;
  if (block % 2 == 0) {
    plan.d_updates = 1;
    plan.g_updates = 0;
  } else {
    plan.d_updates = 0;
    plan.g_updates = 1;
  }
  return plan;
}

UpdatePlan plan_for(ScheduleMode mode, long step, int k) {
  return mode == ScheduleMode::ExtraInterval ? plan_step(step, k) : plan_step_block(step, k);
}

std::string GuardStatus::str() const {
  if (d && g) return "warn_DG";
  if (d) return "warn_D";
  if (g) return "warn_G";
  return "ok";
}

namespace {

// Returns the start step of the streak if the last `window` records all have
// loss >= band, extended backwards past the window to the true streak start.
std::optional<GuardWarning> check_band(const std::deque<LossRecord>& history,
                                       double LossRecord::* loss, double band, int window) {
  if (window < 1) throw ConfigError("divergence_guard: window must be >= 1");
  if (history.size() < static_cast<size_t>(window)) return std::nullopt;
  const size_t n = history.size();
  for (size_t i = n - static_cast<size_t>(window); i < n; ++i) {
    if (history[i].*loss < band) return std::nullopt;
  }
  size_t first = n - static_cast<size_t>(window);
  while (first > 0 && history[first - 1].*loss >= band) --first;
  return GuardWarning{history[first].step};
}

}  // namespace

GuardStatus divergence_guard(const std::deque<LossRecord>& history, GuardBands bands, int window) {
  GuardStatus status;
  status.d = check_band(history, &LossRecord::d_loss, bands.d, window);
  status.g = check_band(history, &LossRecord::g_loss, bands.g, window);
  return status;
}

int batch_size_for(int resolution, std::optional<int> override_batch) {
  if (override_batch) {
    if (*override_batch < 1)
      throw ConfigError("batch override must be >= 1, got " + std::to_string(*override_batch));
    return *override_batch;
  }
  constexpr int kLoRes = 192, kLoBatch = 128;
  constexpr int kHiRes = 1024, kHiBatch = 6;
  if (resolution == kLoRes) return kLoBatch;
  if (resolution == kHiRes) return kHiBatch;
  if (resolution < kLoRes || resolution > kHiRes)
    throw ConfigError("no batch size scheduled for resolution " + std::to_string(resolution) +
                      " (schedule covers 192..1024); set an explicit batch override");
  const double alpha = std::log(static_cast<double>(kHiBatch) / kLoBatch) /
                       std::log(static_cast<double>(kHiRes) / kLoRes);
  const double b = kLoBatch * std::pow(static_cast<double>(resolution) / kLoRes, alpha);
  return std::max(1, static_cast<int>(std::floor(b)));
}

}  // namespace ganforge
