#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ganforge/errors.hpp"
#include "ganforge/models.hpp"
#include "ganforge/optimizer.hpp"
#include "ganforge/schedule.hpp"

namespace ganforge {

constexpr uint32_t kCheckpointVersion = 1;

// Distinct types so a wrong file, a future file and a damaged file are
// distinguishable by catch site, not by message parsing.
struct CheckpointMagicError : IoError {
  using IoError::IoError;
};
struct CheckpointVersionError : IoError {
  using IoError::IoError;
};
struct CheckpointChecksumError : IoError {
  using IoError::IoError;
};

template <typename T>
struct NetSnapshot {
  NetworkSpec spec;
  std::vector<std::pair<std::string, std::vector<T>>> params;
  std::vector<std::pair<std::string, std::vector<T>>> buffers;
};

template <typename T>
struct AdamSnapshot {
  long t = 0;
  // Aligned with the network's parameter order.
  std::vector<std::vector<T>> m, v;
};

struct TrainCursor {
  long step = 0;
  std::array<uint64_t, 4> rng_state{};
  uint64_t data_epoch = 0;
  uint64_t data_batch_index = 0;
};

// Self-describing training state: the config snapshot plus both networks,
// both optimizers and the loop cursor. Loadable without the original config.
template <typename T>
struct Checkpoint {
  std::string config_text;
  NetSnapshot<T> gen, disc;
  AdamSnapshot<T> adam_g, adam_d;
  TrainCursor cursor;
  std::vector<LossRecord> history;
};

// Layout: "GANF", u32 version, u8 element size, payload, then CRC-32 of all
// preceding bytes. All integers and IEEE-754 values little-endian.
template <typename T>
std::vector<uint8_t> serialize_checkpoint(const Checkpoint<T>& ckpt);

template <typename T>
Checkpoint<T> parse_checkpoint(const std::vector<uint8_t>& bytes,
                               uint32_t max_version = kCheckpointVersion);

template <typename T>
void save_checkpoint(const std::string& path, const Checkpoint<T>& ckpt);

template <typename T>
Checkpoint<T> load_checkpoint(const std::string& path,
                              uint32_t max_version = kCheckpointVersion);

// Header-only peek at the stored element width (4 or 8), for dispatching to
// the right precision before a full parse.
uint8_t checkpoint_elem_size(const std::string& path);

template <typename T>
NetSnapshot<T> snapshot_network(Network<T>& net);

// The live network must have been built from the same spec; parameters and
// buffers are matched positionally and checked by name and size.
template <typename T>
void restore_network(Network<T>& net, const NetSnapshot<T>& snap);

template <typename T>
Network<T> network_from_snapshot(const NetSnapshot<T>& snap);

template <typename T>
AdamSnapshot<T> snapshot_adam(const Adam<T>& opt);

template <typename T>
void restore_adam(Adam<T>& opt, const AdamSnapshot<T>& snap);

#define GANFORGE_CKPT_DECL(T)                                                              \
  extern template std::vector<uint8_t> serialize_checkpoint<T>(const Checkpoint<T>&);     \
  extern template Checkpoint<T> parse_checkpoint<T>(const std::vector<uint8_t>&, uint32_t); \
  extern template void save_checkpoint<T>(const std::string&, const Checkpoint<T>&);      \
  extern template Checkpoint<T> load_checkpoint<T>(const std::string&, uint32_t);         \
  extern template NetSnapshot<T> snapshot_network<T>(Network<T>&);                        \
  extern template void restore_network<T>(Network<T>&, const NetSnapshot<T>&);            \
  extern template Network<T> network_from_snapshot<T>(const NetSnapshot<T>&);             \
  extern template AdamSnapshot<T> snapshot_adam<T>(const Adam<T>&);                       \
  extern template void restore_adam<T>(Adam<T>&, const AdamSnapshot<T>&);

GANFORGE_CKPT_DECL(float)
GANFORGE_CKPT_DECL(double)
#undef GANFORGE_CKPT_DECL

}  // namespace ganforge
