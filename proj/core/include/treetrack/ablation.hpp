#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "treetrack/estimator.hpp"
#include "treetrack/synth.hpp"
#include "treetrack/tracker.hpp"

namespace treetrack {

struct AblationRow {
  EstimationMode mode = EstimationMode::TCNN;
  double precision_20 = 0.0;
  double success_50 = 0.0;
  double auc = 0.0;
  int runs = 0;
};

struct AblationTable {
  std::vector<AblationRow> rows;  // one per mode, Linear_single first, TCNN last

  const AblationRow& row(EstimationMode mode) const;
  /// Header `mode,precision_20,success_50,auc,runs`; fixed 6-digit decimals.
  std::string to_csv() const;
};

/// Tracks every sequence once per (mode, seed) with the base config's other
/// settings and averages the one-pass metrics per mode.
AblationTable ablate(std::span<const Sequence> sequences, const TrackerConfig& base,
                     std::span<const std::uint64_t> seeds);

}  // namespace treetrack
