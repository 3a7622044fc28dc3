#pragma once

#include <Eigen/Core>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "treetrack/geometry.hpp"
#include "treetrack/image.hpp"

namespace treetrack {

using FeatureVector = Eigen::VectorXd;
/// Column-per-sample feature matrix (D x N).
using FeatureMatrix = Eigen::MatrixXd;

/// Raised when a box does not overlap the frame at all.
class InvalidCandidate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Maps (frame, box) to a fixed-length descriptor. Implementations must be
/// deterministic and safe to call concurrently.
class FeatureExtractor {
 public:
  virtual ~FeatureExtractor() = default;

  virtual std::string name() const = 0;
  virtual int dimension() const = 0;
  virtual FeatureVector extract(const Frame& frame, const BoundingBox& box) const = 0;
};

/// True when the box has positive-area overlap with the frame rectangle.
bool overlaps_frame(const Frame& frame, const BoundingBox& box);

/// Reference extractor: clip to the frame, bilinear-resample to P x P (zeros
/// outside the frame), then zero-mean/unit-variance normalize each channel.
class PatchExtractor final : public FeatureExtractor {
 public:
  explicit PatchExtractor(int patch_size = 16, int channels = 1);

  std::string name() const override;
  int dimension() const override { return patch_size_ * patch_size_ * channels_; }
  FeatureVector extract(const Frame& frame, const BoundingBox& box) const override;

  int patch_size() const { return patch_size_; }
  int channels() const { return channels_; }

 private:
  int patch_size_;
  int channels_;
};

/// Single-channel bilinear resize with pixel-center alignment and clamped
/// borders. `src` is row-major sw x sh.
std::vector<double> resize_bilinear(std::span<const double> src, int sw, int sh, int dw, int dh);

// ---- TFV1 feature files ------------------------------------------------------

class FeatureFileError : public std::runtime_error {
 public:
  enum class Kind { Io, BadMagic, Truncated, DimensionMismatch };
  FeatureFileError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct FeatureFile {
  std::uint32_t count = 0;
  std::uint32_t dim = 0;
  std::vector<FeatureVector> vectors;
};

/// Layout: "TFV1", u32 count, u32 dim, count*dim float32, all little-endian.
std::vector<std::uint8_t> encode_feature_file(std::span<const FeatureVector> vectors);
FeatureFile decode_feature_file(std::span<const std::uint8_t> bytes,
                                std::optional<std::uint32_t> expected_dim = std::nullopt);

void write_feature_file(const std::string& path, std::span<const FeatureVector> vectors);
FeatureFile load_feature_file(const std::string& path,
                              std::optional<std::uint32_t> expected_dim = std::nullopt);

}  // namespace treetrack
