#include "treetrack/ablation.hpp"

#include <cstdio>
#include <stdexcept>

#include "treetrack/metrics.hpp"

namespace treetrack {

const AblationRow& AblationTable::row(EstimationMode mode) const {
  for (const auto& r : rows) {
    if (r.mode == mode) return r;
  }
  throw std::out_of_range("mode missing from ablation table");
}

std::string AblationTable::to_csv() const {
  std::string out = "mode,precision_20,success_50,auc,runs\n";
  char line[160];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%s,%.6f,%.6f,%.6f,%d\n", to_string(r.mode).c_str(),
                  r.precision_20, r.success_50, r.auc, r.runs);
    out += line;
  }
  return out;
}

AblationTable ablate(std::span<const Sequence> sequences, const TrackerConfig& base,
                     std::span<const std::uint64_t> seeds) {
  if (sequences.empty()) throw std::invalid_argument("ablation needs at least one sequence");
  if (seeds.empty()) throw std::invalid_argument("ablation needs at least one seed");
  AblationTable table;
  for (EstimationMode mode : all_modes()) {
    AblationRow row;
    row.mode = mode;
    for (const auto& seq : sequences) {
      seq.validate();
      for (std::uint64_t seed : seeds) {
        TrackerConfig cfg = base;
        cfg.mode = mode;
        cfg.seed = seed;
        const auto result = run(seq.frames, seq.ground_truth.front(), cfg);
        const auto report = otb_metrics(result.trajectory, seq.ground_truth);
        row.precision_20 += report.precision_20;
        row.success_50 += report.success_50;
        row.auc += report.auc;
        ++row.runs;
      }
    }
    row.precision_20 /= row.runs;
    row.success_50 /= row.runs;
    row.auc /= row.runs;
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace treetrack
