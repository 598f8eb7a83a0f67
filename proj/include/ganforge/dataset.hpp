#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ganforge/image_io.hpp"
#include "ganforge/tensor.hpp"

namespace ganforge {

struct ManifestEntry {
  std::string path;
  int width = 0;
  int height = 0;
  bool upscaled = false;  // max(width, height) < target_resolution
};

struct SkippedFile {
  std::string path;
  std::string reason;
};

struct DatasetManifest {
  int target_resolution = 0;
  std::vector<ManifestEntry> entries;
  std::vector<SkippedFile> skipped;

  size_t size() const { return entries.size(); }
  // Fraction of entries whose source is smaller than the target on both
  // sides, i.e. images the pipeline upscales.
  double undersized_fraction() const;
};

// Scans `dir` for decodable images in filename order. Undecodable files land
// in the skip report; zero decodable images is a ConfigError.
DatasetManifest ingest(const std::string& dir, int target_resolution);

// CSV form: header `path,width,height,upscaled`, booleans as 0/1.
void save_manifest_csv(const DatasetManifest& manifest, const std::string& path);
DatasetManifest load_manifest_csv(const std::string& path, int target_resolution);

// Center-crop to square, then align-corners bilinear resize to
// target x target. Returns CHW planes with values still in [0, 255].
std::vector<double> crop_resize_chw(const Image& img, int target);

// Pixel value p in [0,255] -> p/127.5 - 1 in [-1,1].
double normalize_pixel(double p);

// Decodes, resizes and normalizes the listed entries into a [N,3,R,R]
// tensor with values in [-1,1].
template <typename T>
Tensor<T> load_batch(const DatasetManifest& manifest, const std::vector<size_t>& indices);

// Seeded per-epoch shuffle yielding ceil(N/batch) index lists per epoch, the
// last one possibly partial. The order within an epoch depends only on
// (seed, epoch), so a (epoch, batch_index) cursor fully describes progress.
class EpochIterator {
 public:
  EpochIterator(size_t n, size_t batch, uint64_t seed);

  size_t batches_per_epoch() const { return (n_ + batch_ - 1) / batch_; }
  std::vector<size_t> next();

  uint64_t epoch() const { return epoch_; }
  size_t batch_index() const { return batch_index_; }
  void seek(uint64_t epoch, size_t batch_index);

 private:
  void shuffle_for_epoch();

  size_t n_;
  size_t batch_;
  uint64_t seed_;
  uint64_t epoch_ = 0;
  size_t batch_index_ = 0;
  std::vector<size_t> perm_;
};

extern template Tensor<float> load_batch<float>(const DatasetManifest&,
                                                const std::vector<size_t>&);
extern template Tensor<double> load_batch<double>(const DatasetManifest&,
                                                  const std::vector<size_t>&);

}  // namespace ganforge
