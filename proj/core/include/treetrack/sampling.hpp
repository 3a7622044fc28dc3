#pragma once

#include <vector>

#include "treetrack/geometry.hpp"
#include "treetrack/rng.hpp"

namespace treetrack {

struct SamplingConfig {
  int n_candidates = 256;
  double sigma_xy_factor = 0.3;  // translation std as a fraction of l
  double sigma_s = 0.5;          // std of the log-scale index
  double scale_base = kDefaultScaleBase;

  /// Throws std::invalid_argument on a non-positive count or sigma.
  void validate() const;
};

/// Draws cfg.n_candidates states from an axis-independent normal centered at
/// `prev`. `box_extent` is l, the mean of the previous box's width and height.
/// Candidates are not rejected at frame borders.
std::vector<TargetState> draw_candidates(const TargetState& prev, double box_extent,
                                         const SamplingConfig& cfg, RngStream& rng);

inline double mean_extent(const BoundingBox& b) { return 0.5 * (b.w + b.h); }

}  // namespace treetrack
