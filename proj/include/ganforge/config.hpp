#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ganforge/losses.hpp"
#include "ganforge/schedule.hpp"

namespace ganforge {

enum class Precision : uint8_t { F32 = 4, F64 = 8 };

Precision parse_precision(const std::string& name);
std::string precision_name(Precision p);
inline int precision_bytes(Precision p) { return static_cast<int>(p); }

// One flat key = value file with [run], [model], [data], [latent] and
// [train] sections; unknown sections or keys are errors, as is any value
// that fails its field check. The raw text travels into checkpoints so a
// run is reconstructible from its artifacts.
struct RunConfig {
  // [run]
  uint64_t seed = 1;
  Precision precision = Precision::F32;
  std::string checkpoint_dir;
  long checkpoint_interval = 100;

  // [model]
  int resolution = 0;
  double width_multiplier = 1.0;

  // [data]
  std::string data_dir;
  std::optional<int> batch_override;

  // [latent]
  int latent_dim = 100;

  // [train]
  long total_steps = 1000;
  int alt_interval = 50;
  int guard_window = 25;
  double d_loss_band = 1.0;
  double g_loss_band = 3.0;
  double learning_rate = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  GLossMode g_loss_mode = GLossMode::NonSaturating;
  ScheduleMode schedule_mode = ScheduleMode::ExtraInterval;
  bool halt_on_warn = false;

  std::string source_text;
};

// Parses and validates; every error is a ConfigError naming the offending
// section, key and line. `origin` prefixes messages (usually the path).
RunConfig parse_run_config(const std::string& text, const std::string& origin);
RunConfig load_run_config(const std::string& path);

// The batch size this config trains at (override, else the schedule).
int scheduled_batch(const RunConfig& cfg);

}  // namespace ganforge
