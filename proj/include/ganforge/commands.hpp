#pragma once

#include <cstdint>
#include <string>

namespace ganforge {

// Subcommand bodies behind the CLI. All of them signal failure by throwing
// ConfigError / NumericError / IoError, which the CLI maps to exit codes
// 1 / 2 / 3; a plain int return is the success exit code.

// Trains per the config file; with a resume path, restores the checkpoint
// and appends to the existing loss log instead of starting one.
int cmd_train(const std::string& config_path, const std::string& resume_path);

int cmd_sample(const std::string& checkpoint_path, double truncation, int rows, int cols,
               const std::string& out_path, uint64_t seed);

int cmd_compare_truncation(const std::string& checkpoint_path, double c1, double c2, int n,
                           const std::string& out_dir, uint64_t seed);

// Prints one line per op; returns 2 if any op exceeds its tolerance.
int cmd_grad_check(const std::string& preset);

int cmd_dataset_scan(const std::string& dir, int resolution, const std::string& manifest_out);

}  // namespace ganforge
