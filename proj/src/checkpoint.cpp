#include "ganforge/checkpoint.hpp"

#include <cstring>

#include "ganforge/bytes.hpp"

namespace ganforge {

namespace {

template <typename T>
void write_values(ByteWriter& w, const std::vector<T>& v) {
  w.u64(v.size());
  for (const T x : v) {
    if constexpr (sizeof(T) == 4) {
      w.f32(static_cast<float>(x));
    } else {
      w.f64(static_cast<double>(x));
    }
  }
}

template <typename T>
std::vector<T> read_values(ByteReader& r) {
  const uint64_t n = r.u64();
  if (n * sizeof(T) > r.remaining())
    throw IoError("checkpoint payload truncated at byte " + std::to_string(r.pos()));
  std::vector<T> v(n);
  for (auto& x : v) {
    if constexpr (sizeof(T) == 4) {
      x = r.f32();
    } else {
      x = r.f64();
    }
  }
  return v;
}

void write_spec(ByteWriter& w, const NetworkSpec& spec) {
  w.u8(static_cast<uint8_t>(spec.role));
  w.u32(static_cast<uint32_t>(spec.target_resolution));
  w.u32(static_cast<uint32_t>(spec.base_spatial));
  w.u32(static_cast<uint32_t>(spec.latent_dim));
  w.u32(static_cast<uint32_t>(spec.kernel));
  w.u32(static_cast<uint32_t>(spec.stride));
  w.u32(static_cast<uint32_t>(spec.channels.size()));
  for (const int c : spec.channels) w.u32(static_cast<uint32_t>(c));
}

NetworkSpec read_spec(ByteReader& r) {
  NetworkSpec spec;
  const uint8_t role = r.u8();
  if (role > 1) throw IoError("checkpoint names an unknown network role " + std::to_string(role));
  spec.role = static_cast<NetRole>(role);
  spec.target_resolution = static_cast<int>(r.u32());
  spec.base_spatial = static_cast<int>(r.u32());
  spec.latent_dim = static_cast<int>(r.u32());
  spec.kernel = static_cast<int>(r.u32());
  spec.stride = static_cast<int>(r.u32());
  const uint32_t n = r.u32();
  spec.channels.resize(n);
  for (auto& c : spec.channels) c = static_cast<int>(r.u32());
  return spec;
}

template <typename T>
void write_named(ByteWriter& w, const std::vector<std::pair<std::string, std::vector<T>>>& list) {
  w.u32(static_cast<uint32_t>(list.size()));
  for (const auto& [name, values] : list) {
    w.str(name);
    write_values(w, values);
  }
}

template <typename T>
std::vector<std::pair<std::string, std::vector<T>>> read_named(ByteReader& r) {
  const uint32_t n = r.u32();
  std::vector<std::pair<std::string, std::vector<T>>> list;
  list.reserve(n);
  for (uint32_t i = 0; i < n; ++i) {
    std::string name = r.str();
    list.emplace_back(std::move(name), read_values<T>(r));
  }
  return list;
}

template <typename T>
void write_adam(ByteWriter& w, const AdamSnapshot<T>& snap) {
  w.i64(snap.t);
  w.u32(static_cast<uint32_t>(snap.m.size()));
  for (const auto& m : snap.m) write_values(w, m);
  w.u32(static_cast<uint32_t>(snap.v.size()));
  for (const auto& v : snap.v) write_values(w, v);
}

template <typename T>
AdamSnapshot<T> read_adam(ByteReader& r) {
  AdamSnapshot<T> snap;
  snap.t = static_cast<long>(r.i64());
  const uint32_t nm = r.u32();
  snap.m.reserve(nm);
  for (uint32_t i = 0; i < nm; ++i) snap.m.push_back(read_values<T>(r));
  const uint32_t nv = r.u32();
  snap.v.reserve(nv);
  for (uint32_t i = 0; i < nv; ++i) snap.v.push_back(read_values<T>(r));
  return snap;
}

constexpr char kMagic[4] = {'G', 'A', 'N', 'F'};

}  // namespace

template <typename T>
std::vector<uint8_t> serialize_checkpoint(const Checkpoint<T>& ckpt) {
  ByteWriter w;
  w.raw(kMagic, 4);
  w.u32(kCheckpointVersion);
  w.u8(static_cast<uint8_t>(sizeof(T)));
  w.str(ckpt.config_text);
  for (const auto* net : {&ckpt.gen, &ckpt.disc}) {
    write_spec(w, net->spec);
    write_named(w, net->params);
    write_named(w, net->buffers);
  }
  write_adam(w, ckpt.adam_g);
  write_adam(w, ckpt.adam_d);
  w.i64(ckpt.cursor.step);
  for (const uint64_t s : ckpt.cursor.rng_state) w.u64(s);
  w.u64(ckpt.cursor.data_epoch);
  w.u64(ckpt.cursor.data_batch_index);
  w.u32(static_cast<uint32_t>(ckpt.history.size()));
  for (const auto& h : ckpt.history) {
    w.i64(h.step);
    w.f64(h.d_loss);
    w.f64(h.g_loss);
  }
  const uint32_t crc = crc32(w.bytes().data(), w.bytes().size());
  w.u32(crc);
  return w.take();
}

template <typename T>
Checkpoint<T> parse_checkpoint(const std::vector<uint8_t>& bytes, uint32_t max_version) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw CheckpointMagicError("not a checkpoint file (bad magic)");
  if (bytes.size() < 13) throw IoError("checkpoint header truncated");

  ByteReader r(bytes);
  char magic[4];
  r.raw(magic, 4);
  const uint32_t version = r.u32();
  if (version > max_version)
    throw CheckpointVersionError("checkpoint format version " + std::to_string(version) +
                                 " exceeds supported version " + std::to_string(max_version));

  const uint32_t stored_crc = static_cast<uint32_t>(bytes[bytes.size() - 4]) |
                              static_cast<uint32_t>(bytes[bytes.size() - 3]) << 8 |
                              static_cast<uint32_t>(bytes[bytes.size() - 2]) << 16 |
                              static_cast<uint32_t>(bytes[bytes.size() - 1]) << 24;
  const uint32_t computed_crc = crc32(bytes.data(), bytes.size() - 4);
  if (stored_crc != computed_crc)
    throw CheckpointChecksumError("checkpoint checksum mismatch (stored " +
                                  std::to_string(stored_crc) + ", computed " +
                                  std::to_string(computed_crc) + ")");

  const uint8_t elem = r.u8();
  if (elem != sizeof(T))
    throw ConfigError("checkpoint stores " + std::string(elem == 4 ? "f32" : "f64") +
                      " values, loader expects " + (sizeof(T) == 4 ? "f32" : "f64"));

  Checkpoint<T> ckpt;
  ckpt.config_text = r.str();
  for (auto* net : {&ckpt.gen, &ckpt.disc}) {
    net->spec = read_spec(r);
    net->params = read_named<T>(r);
    net->buffers = read_named<T>(r);
  }
  ckpt.adam_g = read_adam<T>(r);
  ckpt.adam_d = read_adam<T>(r);
  ckpt.cursor.step = static_cast<long>(r.i64());
  for (auto& s : ckpt.cursor.rng_state) s = r.u64();
  ckpt.cursor.data_epoch = r.u64();
  ckpt.cursor.data_batch_index = r.u64();
  const uint32_t nh = r.u32();
  ckpt.history.reserve(nh);
  for (uint32_t i = 0; i < nh; ++i) {
    LossRecord rec;
    rec.step = static_cast<long>(r.i64());
    rec.d_loss = r.f64();
    rec.g_loss = r.f64();
    ckpt.history.push_back(rec);
  }
  if (r.remaining() != 4)
    throw IoError("checkpoint parse ended with " + std::to_string(r.remaining()) +
                  " bytes remaining (expected the 4-byte checksum)");
  return ckpt;
}

template <typename T>
void save_checkpoint(const std::string& path, const Checkpoint<T>& ckpt) {
  write_file_atomic(path, serialize_checkpoint(ckpt));
}

template <typename T>
Checkpoint<T> load_checkpoint(const std::string& path, uint32_t max_version) {
  try {
    return parse_checkpoint<T>(read_file(path), max_version);
  } catch (const CheckpointMagicError& e) {
    throw CheckpointMagicError(path + ": " + e.what());
  } catch (const CheckpointVersionError& e) {
    throw CheckpointVersionError(path + ": " + e.what());
  } catch (const CheckpointChecksumError& e) {
    throw CheckpointChecksumError(path + ": " + e.what());
  }
}

uint8_t checkpoint_elem_size(const std::string& path) {
  const auto bytes = read_file(path);
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw CheckpointMagicError(path + ": not a checkpoint file (bad magic)");
  if (bytes.size() < 9) throw IoError(path + ": checkpoint header truncated");
  ByteReader r(bytes);
  char magic[4];
  r.raw(magic, 4);
  const uint32_t version = r.u32();
  if (version > kCheckpointVersion)
    throw CheckpointVersionError(path + ": checkpoint format version " + std::to_string(version) +
                                 " exceeds supported version " +
                                 std::to_string(kCheckpointVersion));
  const uint8_t elem = r.u8();
  if (elem != 4 && elem != 8)
    throw IoError(path + ": checkpoint declares invalid element size " + std::to_string(elem));
  return elem;
}

template <typename T>
NetSnapshot<T> snapshot_network(Network<T>& net) {
  NetSnapshot<T> snap;
  snap.spec = net.spec();
  for (auto& p : net.params()) snap.params.emplace_back(p.name, p.tensor.values());
  for (auto& b : net.buffers()) snap.buffers.emplace_back(b.name, *b.data);
  return snap;
}

template <typename T>
void restore_network(Network<T>& net, const NetSnapshot<T>& snap) {
  if (!(net.spec() == snap.spec))
    throw ConfigError("network spec does not match checkpoint spec");
  auto params = net.params();
  if (params.size() != snap.params.size())
    throw IoError("checkpoint stores " + std::to_string(snap.params.size()) +
                  " parameters, network has " + std::to_string(params.size()));
  for (size_t i = 0; i < params.size(); ++i) {
    const auto& [name, values] = snap.params[i];
    if (params[i].name != name)
      throw IoError("checkpoint parameter '" + name + "' does not match network parameter '" +
                    params[i].name + "'");
    if (params[i].tensor.numel() != values.size())
      throw IoError("checkpoint parameter '" + name + "' holds " +
                    std::to_string(values.size()) + " values, network expects " +
                    std::to_string(params[i].tensor.numel()));
    params[i].tensor.values() = values;
    params[i].tensor.zero_grad();
  }
  auto buffers = net.buffers();
  if (buffers.size() != snap.buffers.size())
    throw IoError("checkpoint stores " + std::to_string(snap.buffers.size()) +
                  " buffers, network has " + std::to_string(buffers.size()));
  for (size_t i = 0; i < buffers.size(); ++i) {
    const auto& [name, values] = snap.buffers[i];
    if (buffers[i].name != name)
      throw IoError("checkpoint buffer '" + name + "' does not match network buffer '" +
                    buffers[i].name + "'");
    if (buffers[i].data->size() != values.size())
      throw IoError("checkpoint buffer '" + name + "' size mismatch");
    *buffers[i].data = values;
  }
}

template <typename T>
Network<T> network_from_snapshot(const NetSnapshot<T>& snap) {
  Network<T> net = build_from_spec<T>(snap.spec);
  restore_network(net, snap);
  return net;
}

template <typename T>
AdamSnapshot<T> snapshot_adam(const Adam<T>& opt) {
  return {opt.t(), opt.moments_m(), opt.moments_v()};
}

template <typename T>
void restore_adam(Adam<T>& opt, const AdamSnapshot<T>& snap) {
  const auto& params = opt.params();
  if (snap.m.size() != params.size() || snap.v.size() != params.size())
    throw ConfigError("checkpoint optimizer moments do not match parameter count");
  for (size_t i = 0; i < params.size(); ++i) {
    if (snap.m[i].size() != params[i].tensor.numel() ||
        snap.v[i].size() != params[i].tensor.numel())
      throw ConfigError("checkpoint optimizer moment size mismatch for parameter '" +
                        params[i].name + "'");
  }
  opt.moments_m() = snap.m;
  opt.moments_v() = snap.v;
  opt.set_t(snap.t);
}

#define GANFORGE_CKPT_INST(T)                                                       \
  template std::vector<uint8_t> serialize_checkpoint<T>(const Checkpoint<T>&);     \
  template Checkpoint<T> parse_checkpoint<T>(const std::vector<uint8_t>&, uint32_t); \
  template void save_checkpoint<T>(const std::string&, const Checkpoint<T>&);      \
  template Checkpoint<T> load_checkpoint<T>(const std::string&, uint32_t);         \
  template NetSnapshot<T> snapshot_network<T>(Network<T>&);                        \
  template void restore_network<T>(Network<T>&, const NetSnapshot<T>&);            \
  template Network<T> network_from_snapshot<T>(const NetSnapshot<T>&);             \
  template AdamSnapshot<T> snapshot_adam<T>(const Adam<T>&);                       \
  template void restore_adam<T>(Adam<T>&, const AdamSnapshot<T>&);

GANFORGE_CKPT_INST(float)
GANFORGE_CKPT_INST(double)
#undef GANFORGE_CKPT_INST

}  // namespace ganforge
