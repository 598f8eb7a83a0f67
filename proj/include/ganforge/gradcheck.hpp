#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ganforge/tensor.hpp"

namespace ganforge {

struct GradCheckEntry {
  std::string param;
  double max_rel_error = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double max_rel_error() const;
};

// Central-difference verification of reverse-mode gradients, 64-bit only.
// `f` must rebuild its graph from the current parameter values on every call
// and return a scalar loss; the numeric side only ever evaluates f, so it is
// independent of the backward implementation under test.
//
// Per element: rel = |analytic - numeric| / max(|analytic|, |numeric|, 1e-6).
// The report carries the max over elements per parameter; exceeding a
// tolerance is the caller's (or the test's) decision, not an op error.
GradCheckReport grad_check(const std::function<Tensor<double>()>& f,
                           const std::vector<std::pair<std::string, Tensor<double>>>& params,
                           double step = 1e-5);

// Named check over one op or composition, with the tolerance it must meet.
struct GradCheckCase {
  std::string op;
  double max_rel_error = 0.0;
  double tolerance = 0.0;
  bool pass() const { return max_rel_error < tolerance; }
};

struct GradCheckSuite {
  std::vector<GradCheckCase> cases;
  bool all_pass() const;
};

// Fixed-seed sweep over every layer primitive plus composed toy G/D losses.
// Preset "default" is the real suite; "negative-control" adds a deliberately
// corrupted backward and must fail. Unknown presets throw ConfigError.
GradCheckSuite run_grad_check_suite(const std::string& preset);

}  // namespace ganforge
