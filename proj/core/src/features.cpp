#include "treetrack/features.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>

namespace treetrack {

bool overlaps_frame(const Frame& frame, const BoundingBox& box) {
  const double iw = std::min(box.right(), static_cast<double>(frame.width())) - std::max(box.x, 0.0);
  const double ih =
      std::min(box.bottom(), static_cast<double>(frame.height())) - std::max(box.y, 0.0);
  return iw > 0.0 && ih > 0.0;
}

namespace {

// Clamped bilinear lookup at pixel-index coordinates (u, v).
template <typename Fetch>
double bilinear(Fetch&& fetch, int w, int h, double u, double v) {
  u = std::clamp(u, 0.0, static_cast<double>(w - 1));
  v = std::clamp(v, 0.0, static_cast<double>(h - 1));
  const int x0 = static_cast<int>(std::floor(u));
  const int y0 = static_cast<int>(std::floor(v));
  const int x1 = std::min(x0 + 1, w - 1);
  const int y1 = std::min(y0 + 1, h - 1);
  const double fx = u - x0;
  const double fy = v - y0;
  const double top = (1.0 - fx) * fetch(x0, y0) + fx * fetch(x1, y0);
  const double bot = (1.0 - fx) * fetch(x0, y1) + fx * fetch(x1, y1);
  return (1.0 - fy) * top + fy * bot;
}

void normalize_channel(double* values, std::size_t n) {
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += values[i];
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) var += (values[i] - mean) * (values[i] - mean);
  var /= static_cast<double>(n);
  if (var < 1e-12) {
    std::fill(values, values + n, 0.0);
    return;
  }
  const double inv = 1.0 / std::sqrt(var);
  for (std::size_t i = 0; i < n; ++i) values[i] = (values[i] - mean) * inv;
}

}  // namespace

std::vector<double> resize_bilinear(std::span<const double> src, int sw, int sh, int dw, int dh) {
  if (sw <= 0 || sh <= 0 || dw <= 0 || dh <= 0) {
    throw std::invalid_argument("resize dimensions must be positive");
  }
  if (src.size() != static_cast<std::size_t>(sw) * sh) {
    throw std::invalid_argument("resize source size mismatch");
  }
  auto fetch = [&](int x, int y) { return src[static_cast<std::size_t>(y) * sw + x]; };
  std::vector<double> out(static_cast<std::size_t>(dw) * dh);
  const double sx = static_cast<double>(sw) / dw;
  const double sy = static_cast<double>(sh) / dh;
  for (int i = 0; i < dh; ++i) {
    for (int j = 0; j < dw; ++j) {
      out[static_cast<std::size_t>(i) * dw + j] =
          bilinear(fetch, sw, sh, (j + 0.5) * sx - 0.5, (i + 0.5) * sy - 0.5);
    }
  }
  return out;
}

PatchExtractor::PatchExtractor(int patch_size, int channels)
    : patch_size_(patch_size), channels_(channels) {
  if (patch_size < 1) throw std::invalid_argument("patch size must be >= 1");
  if (channels != 1 && channels != 3) throw std::invalid_argument("channels must be 1 or 3");
}

std::string PatchExtractor::name() const {
  return "patch" + std::to_string(patch_size_) + "x" + std::to_string(channels_);
}

FeatureVector PatchExtractor::extract(const Frame& frame, const BoundingBox& box) const {
  if (frame.channels() != channels_) {
    throw std::invalid_argument("frame channel count does not match extractor");
  }
  if (!overlaps_frame(frame, box)) throw InvalidCandidate("box lies entirely outside the frame");

  const int p = patch_size_;
  const std::size_t plane = static_cast<std::size_t>(p) * p;
  FeatureVector out = FeatureVector::Zero(static_cast<Eigen::Index>(plane * channels_));
  const double step_x = box.w / p;
  const double step_y = box.h / p;
  const double fw = frame.width();
  const double fh = frame.height();

  for (int c = 0; c < channels_; ++c) {
    auto fetch = [&](int x, int y) { return frame.at(x, y, c) / 255.0; };
    double* dst = out.data() + plane * c;
    for (int i = 0; i < p; ++i) {
      const double py = box.y + (i + 0.5) * step_y;
      if (py < 0.0 || py > fh) continue;
      for (int j = 0; j < p; ++j) {
        const double px = box.x + (j + 0.5) * step_x;
        if (px < 0.0 || px > fw) continue;
        dst[static_cast<std::size_t>(i) * p + j] =
            bilinear(fetch, frame.width(), frame.height(), px - 0.5, py - 0.5);
      }
    }
    normalize_channel(dst, plane);
  }
  return out;
}

// ---- TFV1 ---------------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'T', 'F', 'V', '1'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[at + i]) << (8 * i);
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_feature_file(std::span<const FeatureVector> vectors) {
  const auto dim = vectors.empty() ? 0u : static_cast<std::uint32_t>(vectors.front().size());
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put_u32(out, static_cast<std::uint32_t>(vectors.size()));
  put_u32(out, dim);
  out.reserve(out.size() + vectors.size() * dim * 4);
  for (const auto& v : vectors) {
    if (static_cast<std::uint32_t>(v.size()) != dim) {
      throw FeatureFileError(FeatureFileError::Kind::DimensionMismatch,
                             "feature vectors have inconsistent lengths");
    }
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v[i])));
    }
  }
  return out;
}

FeatureFile decode_feature_file(std::span<const std::uint8_t> bytes,
                                std::optional<std::uint32_t> expected_dim) {
  using Kind = FeatureFileError::Kind;
  if (bytes.size() < 4 || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    throw FeatureFileError(Kind::BadMagic, "feature file does not start with TFV1");
  }
  if (bytes.size() < 12) throw FeatureFileError(Kind::Truncated, "feature file header truncated");
  FeatureFile file;
  file.count = get_u32(bytes, 4);
  file.dim = get_u32(bytes, 8);
  if (expected_dim && *expected_dim != file.dim) {
    throw FeatureFileError(Kind::DimensionMismatch,
                           "feature dimension " + std::to_string(file.dim) + " != expected " +
                               std::to_string(*expected_dim));
  }
  const std::uint64_t need = 12 + std::uint64_t{file.count} * file.dim * 4;
  if (bytes.size() < need) {
    throw FeatureFileError(Kind::Truncated, "feature file payload truncated");
  }
  file.vectors.reserve(file.count);
  std::size_t at = 12;
  for (std::uint32_t n = 0; n < file.count; ++n) {
    FeatureVector v(file.dim);
    for (std::uint32_t i = 0; i < file.dim; ++i, at += 4) {
      v[i] = static_cast<double>(std::bit_cast<float>(get_u32(bytes, at)));
    }
    file.vectors.push_back(std::move(v));
  }
  return file;
}

void write_feature_file(const std::string& path, std::span<const FeatureVector> vectors) {
  const auto bytes = encode_feature_file(vectors);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FeatureFileError(FeatureFileError::Kind::Io, "cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

FeatureFile load_feature_file(const std::string& path, std::optional<std::uint32_t> expected_dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FeatureFileError(FeatureFileError::Kind::Io, "cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_feature_file(bytes, expected_dim);
}

}  // namespace treetrack
