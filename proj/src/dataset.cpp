#include "ganforge/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "ganforge/bytes.hpp"
#include "ganforge/errors.hpp"
#include "ganforge/rng.hpp"

namespace fs = std::filesystem;

namespace ganforge {

double DatasetManifest::undersized_fraction() const {
  if (entries.empty()) return 0.0;
  size_t count = 0;
  for (const auto& e : entries) count += e.upscaled ? 1 : 0;
  return static_cast<double>(count) / static_cast<double>(entries.size());
}

DatasetManifest ingest(const std::string& dir, int target_resolution) {
  if (target_resolution < 1)
    throw ConfigError("ingest: target resolution must be >= 1, got " +
                      std::to_string(target_resolution));
  std::vector<std::string> files;
  try {
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file()) files.push_back(entry.path().string());
    }
  } catch (const fs::filesystem_error& e) {
    throw IoError(dir + ": cannot scan directory: " + e.what());
  }
  std::sort(files.begin(), files.end());

  DatasetManifest manifest;
  manifest.target_resolution = target_resolution;
  for (const auto& path : files) {
    try {
      const Image img = read_ppm(path);
      const bool upscaled = std::max(img.width, img.height) < target_resolution;
      manifest.entries.push_back({path, img.width, img.height, upscaled});
    } catch (const IoError& e) {
      manifest.skipped.push_back({path, e.what()});
    }
  }
  if (manifest.entries.empty())
    throw ConfigError(dir + ": no decodable images (" + std::to_string(manifest.skipped.size()) +
                      " files skipped)");
  return manifest;
}

void save_manifest_csv(const DatasetManifest& manifest, const std::string& path) {
  std::string out = "path,width,height,upscaled\n";
  for (const auto& e : manifest.entries) {
    out += e.path + "," + std::to_string(e.width) + "," + std::to_string(e.height) + "," +
           (e.upscaled ? "1" : "0") + "\n";
  }
  write_file_atomic(path, reinterpret_cast<const uint8_t*>(out.data()), out.size());
}

namespace {

int parse_csv_int(const std::string& field, const std::string& path, size_t line_no) {
  try {
    size_t used = 0;
    const int v = std::stoi(field, &used);
    if (used != field.size()) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw IoError(path + ": line " + std::to_string(line_no) + ": expected integer, got '" +
                  field + "'");
  }
}

}  // namespace

DatasetManifest load_manifest_csv(const std::string& path, int target_resolution) {
  const auto bytes = read_file(path);
  const std::string text(bytes.begin(), bytes.end());

  DatasetManifest manifest;
  manifest.target_resolution = target_resolution;
  size_t line_no = 0;
  size_t start = 0;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "path,width,height,upscaled")
        throw IoError(path + ": bad manifest header '" + line + "'");
      continue;
    }
    // Split on the last three commas so paths containing commas survive.
    size_t c3 = line.rfind(',');
    size_t c2 = c3 == std::string::npos ? std::string::npos : line.rfind(',', c3 - 1);
    size_t c1 = c2 == std::string::npos ? std::string::npos : line.rfind(',', c2 - 1);
    if (c1 == std::string::npos || c1 == 0)
      throw IoError(path + ": line " + std::to_string(line_no) + ": expected 4 fields");
    ManifestEntry e;
    e.path = line.substr(0, c1);
    e.width = parse_csv_int(line.substr(c1 + 1, c2 - c1 - 1), path, line_no);
    e.height = parse_csv_int(line.substr(c2 + 1, c3 - c2 - 1), path, line_no);
    const std::string flag = line.substr(c3 + 1);
    if (flag != "0" && flag != "1")
      throw IoError(path + ": line " + std::to_string(line_no) + ": upscaled must be 0 or 1");
    e.upscaled = flag == "1";
    const bool expect = std::max(e.width, e.height) < target_resolution;
    if (e.upscaled != expect)
      throw ConfigError(path + ": line " + std::to_string(line_no) +
                        ": upscaled flag inconsistent with resolution " +
                        std::to_string(target_resolution));
    manifest.entries.push_back(std::move(e));
  }
  if (manifest.entries.empty()) throw ConfigError(path + ": manifest lists no images");
  return manifest;
}

std::vector<double> crop_resize_chw(const Image& img, int target) {
  if (target < 1) throw ConfigError("resize target must be >= 1, got " + std::to_string(target));
  const int s = std::min(img.width, img.height);
  const int x0 = (img.width - s) / 2;
  const int y0 = (img.height - s) / 2;
  const auto at = [&](int c, int y, int x) -> double {
    return img.pixels[3u * (static_cast<size_t>(y0 + y) * img.width + (x0 + x)) + c];
  };
  // Align-corners sampling: output corners map exactly onto source corners,
  // which keeps a 1:1 resize the identity.
  const double scale = target == 1 ? 0.0 : static_cast<double>(s - 1) / (target - 1);
  std::vector<double> out(3u * static_cast<size_t>(target) * target);
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < target; ++i) {
      const double sy = i * scale;
      const int yl = static_cast<int>(sy);
      const int yh = std::min(yl + 1, s - 1);
      const double fy = sy - yl;
      for (int j = 0; j < target; ++j) {
        const double sx = j * scale;
        const int xl = static_cast<int>(sx);
        const int xh = std::min(xl + 1, s - 1);
        const double fx = sx - xl;
        const double v = (1 - fy) * ((1 - fx) * at(c, yl, xl) + fx * at(c, yl, xh)) +
                         fy * ((1 - fx) * at(c, yh, xl) + fx * at(c, yh, xh));
        out[(static_cast<size_t>(c) * target + i) * target + j] = v;
      }
    }
  }
  return out;
}

double normalize_pixel(double p) { return p / 127.5 - 1.0; }

template <typename T>
Tensor<T> load_batch(const DatasetManifest& manifest, const std::vector<size_t>& indices) {
  if (indices.empty()) throw ConfigError("load_batch: empty index list");
  const int r = manifest.target_resolution;
  const size_t per = 3u * static_cast<size_t>(r) * r;
  std::vector<T> data(indices.size() * per);
  for (size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= manifest.entries.size())
      throw ConfigError("load_batch: index " + std::to_string(indices[k]) +
                        " out of range for manifest of " +
                        std::to_string(manifest.entries.size()));
    const auto& entry = manifest.entries[indices[k]];
    const auto planes = crop_resize_chw(read_ppm(entry.path), r);
    for (size_t i = 0; i < per; ++i)
      data[k * per + i] = static_cast<T>(normalize_pixel(planes[i]));
  }
  return Tensor<T>({static_cast<int>(indices.size()), 3, r, r}, std::move(data), false);
}

EpochIterator::EpochIterator(size_t n, size_t batch, uint64_t seed)
    : n_(n), batch_(batch), seed_(seed) {
  if (n_ < 1) throw ConfigError("epoch iterator needs a non-empty dataset");
  if (batch_ < 1) throw ConfigError("epoch iterator batch size must be >= 1");
  shuffle_for_epoch();
}

void EpochIterator::shuffle_for_epoch() {
  perm_.resize(n_);
  for (size_t i = 0; i < n_; ++i) perm_[i] = i;
  Rng rng(derive_seed(seed_, epoch_));
  for (size_t i = n_ - 1; i > 0; --i) {
    const uint64_t j = rng.below(i + 1);
    std::swap(perm_[i], perm_[j]);
  }
}

std::vector<size_t> EpochIterator::next() {
  if (batch_index_ >= batches_per_epoch()) {
    ++epoch_;
    batch_index_ = 0;
    shuffle_for_epoch();
  }
  const size_t begin = batch_index_ * batch_;
  const size_t end = std::min(n_, begin + batch_);
  ++batch_index_;
  return std::vector<size_t>(perm_.begin() + static_cast<ptrdiff_t>(begin),
                             perm_.begin() + static_cast<ptrdiff_t>(end));
}

void EpochIterator::seek(uint64_t epoch, size_t batch_index) {
  if (batch_index > batches_per_epoch())
    throw ConfigError("epoch iterator seek: batch index " + std::to_string(batch_index) +
                      " past epoch end " + std::to_string(batches_per_epoch()));
  epoch_ = epoch;
  batch_index_ = batch_index;
  shuffle_for_epoch();
}

template Tensor<float> load_batch<float>(const DatasetManifest&, const std::vector<size_t>&);
template Tensor<double> load_batch<double>(const DatasetManifest&, const std::vector<size_t>&);

}  // namespace ganforge
