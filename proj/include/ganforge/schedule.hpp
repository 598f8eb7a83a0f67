#pragma once

#include <deque>
#include <optional>
#include <string>

#include "ganforge/errors.hpp"

namespace ganforge {

enum class ExtraTarget : uint8_t { None = 0, G = 1, D = 2 };

std::string extra_target_name(ExtraTarget t);

struct UpdatePlan {
  int d_updates = 1;
  int g_updates = 1;
  ExtraTarget extra = ExtraTarget::None;
};

// Two readings of the interval schedule; ExtraInterval is the default.
enum class ScheduleMode : uint8_t { ExtraInterval = 0, BlockAlternation = 1 };

ScheduleMode parse_schedule_mode(const std::string& name);
std::string schedule_mode_name(ScheduleMode mode);

// Baseline one D and one G update per step. Every k-th step gets one extra
// update whose target alternates across trigger events: trigger 1 -> G,
// trigger 2 -> D, trigger 3 -> G, ... Pure in (step, k); step is 1-based.
UpdatePlan plan_step(long step, int k);

// Alternative reading: training proceeds in k-step blocks that update only
// one network, starting with D (steps 1..k), then G, and so on.
UpdatePlan plan_step_block(long step, int k);

UpdatePlan plan_for(ScheduleMode mode, long step, int k);

struct GuardBands {
  double d = 1.0;
  double g = 3.0;
};

struct LossRecord {
  long step = 0;
  double d_loss = 0.0;
  double g_loss = 0.0;
};

struct GuardWarning {
  long since_step = 0;  // first step of the current out-of-band streak
};

struct GuardStatus {
  std::optional<GuardWarning> d;
  std::optional<GuardWarning> g;
  bool ok() const { return !d && !g; }
  // CSV token: "ok", "warn_D", "warn_G", or "warn_DG" when both trip.
  std::string str() const;
};

// Report-only band check over the recorded loss stream: warns on a network
// iff its loss has been at or above its band for `window` consecutive
// recorded steps (so in-band oscillation never trips it). Never mutates
// training state.
GuardStatus divergence_guard(const std::deque<LossRecord>& history, GuardBands bands, int window);

// Resolution -> batch size. Anchor resolutions return their anchor value
// exactly; in between, a power law through the anchors (exponent
// ln(6/128)/ln(1024/192), about -1.828) is evaluated and floored, never
// below 1. An explicit override wins everywhere; without one, resolutions
// outside [192, 1024] are a ConfigError.
int batch_size_for(int resolution, std::optional<int> override_batch = std::nullopt);

}  // namespace ganforge
