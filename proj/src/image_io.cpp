#include "ganforge/image_io.hpp"

#include <cctype>

#include "ganforge/bytes.hpp"
#include "ganforge/errors.hpp"

namespace ganforge {

namespace {

constexpr int kMaxDim = 1 << 20;

class P6Parser {
 public:
  P6Parser(const std::vector<uint8_t>& bytes, const std::string& origin)
      : b_(bytes), origin_(origin) {}

  Image parse() {
    if (b_.size() < 2 || b_[0] != 'P' || b_[1] != '6') fail("invalid PPM magic (expected 'P6')");
    pos_ = 2;
    const int w = next_int("width");
    const int h = next_int("height");
    const int maxval = next_int("maxval");
    if (w < 1 || w > kMaxDim) fail("width out of range");
    if (h < 1 || h > kMaxDim) fail("height out of range");
    if (maxval != 255) fail("unsupported maxval " + std::to_string(maxval) + " (expected 255)");
    if (pos_ >= b_.size() || !std::isspace(b_[pos_]))
      fail("expected whitespace between maxval and pixel payload");
    ++pos_;
    const size_t need = 3u * static_cast<size_t>(w) * static_cast<size_t>(h);
    if (b_.size() - pos_ < need) {
      const size_t missing = need - (b_.size() - pos_);
      pos_ = b_.size();
      fail("truncated pixel payload (missing " + std::to_string(missing) + " bytes)");
    }
    if (b_.size() - pos_ > need) {
      pos_ += need;
      fail("trailing data after pixel payload");
    }
    Image img;
    img.width = w;
    img.height = h;
    img.pixels.assign(b_.begin() + static_cast<ptrdiff_t>(pos_), b_.end());
    return img;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw IoError(origin_ + ": " + msg + " at byte " + std::to_string(pos_));
  }

  void skip_space_and_comments() {
    while (pos_ < b_.size()) {
      if (std::isspace(b_[pos_])) {
        ++pos_;
      } else if (b_[pos_] == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
      } else {
        return;
      }
    }
  }

  int next_int(const std::string& what) {
    skip_space_and_comments();
    if (pos_ >= b_.size() || !std::isdigit(b_[pos_])) fail("expected integer " + what);
    long v = 0;
    while (pos_ < b_.size() && std::isdigit(b_[pos_])) {
      v = v * 10 + (b_[pos_] - '0');
      if (v > 10L * kMaxDim) fail(what + " too large");
      ++pos_;
    }
    return static_cast<int>(v);
  }

  const std::vector<uint8_t>& b_;
  const std::string& origin_;
  size_t pos_ = 0;
};

}  // namespace

std::vector<uint8_t> encode_ppm(const Image& img) {
  if (img.width < 1 || img.height < 1)
    throw ConfigError("encode_ppm: image dimensions must be positive, got " +
                      std::to_string(img.width) + "x" + std::to_string(img.height));
  const size_t need = 3u * static_cast<size_t>(img.width) * static_cast<size_t>(img.height);
  if (img.pixels.size() != need)
    throw ConfigError("encode_ppm: pixel buffer holds " + std::to_string(img.pixels.size()) +
                      " bytes, expected " + std::to_string(need));
  const std::string header =
      "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  std::vector<uint8_t> out;
  out.reserve(header.size() + need);
  out.insert(out.end(), header.begin(), header.end());
  out.insert(out.end(), img.pixels.begin(), img.pixels.end());
  return out;
}

Image decode_ppm(const std::vector<uint8_t>& bytes, const std::string& origin) {
  return P6Parser(bytes, origin).parse();
}

Image read_ppm(const std::string& path) { return decode_ppm(read_file(path), path); }

void write_ppm(const std::string& path, const Image& img) {
  write_file_atomic(path, encode_ppm(img));
}

}  // namespace ganforge
