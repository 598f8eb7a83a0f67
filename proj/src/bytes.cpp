#include "ganforge/bytes.hpp"

#include <array>
#include <cerrno>
#include <cstdio>
#include <cstring>

namespace ganforge {

namespace {

std::array<uint32_t, 256> make_crc_table() {
  std::array<uint32_t, 256> table{};
  for (uint32_t i = 0; i < 256; ++i) {
    uint32_t c = i;
    for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
    table[i] = c;
  }
  return table;
}

}  // namespace

uint32_t crc32(const uint8_t* data, size_t n, uint32_t seed) {
  static const std::array<uint32_t, 256> table = make_crc_table();
  uint32_t c = seed ^ 0xFFFFFFFFu;
  for (size_t i = 0; i < n; ++i) c = table[(c ^ data[i]) & 0xFF] ^ (c >> 8);
  return c ^ 0xFFFFFFFFu;
}

std::vector<uint8_t> read_file(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw IoError(path + ": " + std::strerror(errno));
  std::vector<uint8_t> out;
  std::array<uint8_t, 1 << 16> chunk;
  size_t got;
  while ((got = std::fread(chunk.data(), 1, chunk.size(), f)) > 0)
    out.insert(out.end(), chunk.data(), chunk.data() + got);
  const bool bad = std::ferror(f) != 0;
  std::fclose(f);
  if (bad) throw IoError(path + ": read failed");
  return out;
}

void write_file_atomic(const std::string& path, const uint8_t* data, size_t n) {
  const std::string tmp = path + ".tmp";
  std::FILE* f = std::fopen(tmp.c_str(), "wb");
  if (!f) throw IoError(tmp + ": " + std::strerror(errno));
  const size_t put = n ? std::fwrite(data, 1, n, f) : 0;
  const bool bad = put != n || std::fflush(f) != 0;
  std::fclose(f);
  if (bad) {
    std::remove(tmp.c_str());
    throw IoError(tmp + ": write failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw IoError(path + ": rename failed: " + std::strerror(errno));
  }
}

void write_file_atomic(const std::string& path, const std::vector<uint8_t>& bytes) {
  write_file_atomic(path, bytes.data(), bytes.size());
}

}  // namespace ganforge
