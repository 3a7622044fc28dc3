#include "treetrack/sampling.hpp"

#include <stdexcept>

namespace treetrack {

void SamplingConfig::validate() const {
  if (n_candidates < 1) throw std::invalid_argument("n_candidates must be >= 1");
  if (!(sigma_xy_factor > 0.0) || !(sigma_s > 0.0)) {
    throw std::invalid_argument("sampling sigmas must be positive");
  }
  if (!(scale_base > 1.0)) throw std::invalid_argument("scale_base must exceed 1");
}

std::vector<TargetState> draw_candidates(const TargetState& prev, double box_extent,
                                         const SamplingConfig& cfg, RngStream& rng) {
  cfg.validate();
  if (!(box_extent > 0.0)) throw std::invalid_argument("box extent must be positive");
  const double sigma_xy = cfg.sigma_xy_factor * box_extent;
  std::vector<TargetState> out;
  out.reserve(static_cast<std::size_t>(cfg.n_candidates));
  for (int i = 0; i < cfg.n_candidates; ++i) {
    TargetState c;
    c.cx = prev.cx + sigma_xy * rng.normal();
    c.cy = prev.cy + sigma_xy * rng.normal();
    c.s = prev.s + cfg.sigma_s * rng.normal();
    out.push_back(c);
  }
  return out;
}

}  // namespace treetrack
