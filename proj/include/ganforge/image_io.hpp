#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ganforge {

// 8-bit RGB image, interleaved row-major (r,g,b per pixel).
struct Image {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> pixels;

  size_t byte_count() const { return pixels.size(); }
};

// Binary PPM (P6, maxval 255). Encoding is canonical: "P6\n{w} {h}\n255\n"
// followed by the raw pixel payload, so encode -> decode -> encode is
// byte-identical. The decoder additionally accepts standard P6 variants
// (extra whitespace, '#' comments) and reports malformed input as IoError
// with the byte offset; `origin` prefixes the message, usually a path.
std::vector<uint8_t> encode_ppm(const Image& img);
Image decode_ppm(const std::vector<uint8_t>& bytes, const std::string& origin);

Image read_ppm(const std::string& path);
void write_ppm(const std::string& path, const Image& img);

}  // namespace ganforge
