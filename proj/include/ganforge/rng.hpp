#pragma once

#include <array>
#include <cstdint>

namespace ganforge {

// xoshiro256** seeded through splitmix64.
//
// The generator is pinned by algorithm, not by library, so streams reproduce
// bit-for-bit on any platform and in any reimplementation:
//   - state: four 64-bit words, filled from splitmix64(seed)
//   - output: rotl(s1 * 5, 7) * 9, then the xoshiro256 state transition
//   - uniform01: top 53 bits of one output scaled by 2^-53, giving [0, 1)
//   - gaussian: Box-Muller on two fresh uniforms, no cached spare, so the
//     complete RNG state is exactly the four words below
//   - below(n): next_u64() % n (modulo bias is irrelevant at our n, and the
//     rule has to be fixed for cross-run reproducibility)
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) { reseed(seed); }

  void reseed(uint64_t seed);

  uint64_t next_u64();

  // Uniform double in [0, 1).
  double uniform01();

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi);

  // Standard Box-Muller; consumes exactly two outputs per call.
  double gaussian(double mean, double stddev);

  // Uniform integer in [0, n); n must be > 0.
  uint64_t below(uint64_t n);

  std::array<uint64_t, 4> state() const { return s_; }
  void set_state(const std::array<uint64_t, 4>& s) { s_ = s; }

 private:
  std::array<uint64_t, 4> s_{};
};

// One splitmix64 step; advances x and returns the mixed output.
uint64_t splitmix64_next(uint64_t& x);

// Deterministic seed derivation for substreams (per-epoch shuffles etc.).
uint64_t derive_seed(uint64_t base, uint64_t stream);

}  // namespace ganforge
