#pragma once

#include <cstdint>

namespace treetrack {

/// Counter-based random stream. The n-th draw is a pure function of
/// (seed, stream, n): a SplitMix64 finalizer applied to a Weyl sequence keyed
/// by the mixed seed and stream id. Gaussians use Box-Muller in double
/// precision, consuming two uniforms per pair.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Derives an independent stream from this one's seed.
  RngStream substream(std::uint64_t stream) const { return RngStream(seed_, stream); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t mix64(std::uint64_t z);

/// Packs a purpose tag and an index into a stream id.
constexpr std::uint64_t stream_id(std::uint32_t purpose, std::uint64_t index) {
  return (static_cast<std::uint64_t>(purpose) << 40) ^ index;
}

}  // namespace treetrack
