#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "treetrack/geometry.hpp"

namespace treetrack {

struct VotSummary {
  double accuracy = 0.0;  // mean IoU over counted frames; 0 when none counted
  int failures = 0;
  int counted_frames = 0;
  std::vector<int> failure_frames;
  std::vector<int> reinit_frames;
};

struct EvalReport {
  std::vector<double> precision_thresholds;  // 0..50 px, step 1
  std::vector<double> precision_curve;       // fraction with center error <= theta
  std::vector<double> success_thresholds;    // 0..1, step 0.05
  std::vector<double> success_curve;         // fraction with IoU > tau
  double precision_20 = 0.0;
  double success_50 = 0.0;
  double auc = 0.0;                          // mean of success_curve
  std::vector<double> ious;                  // per frame; NaN where not tracked
  std::vector<double> center_errors;
  std::optional<VotSummary> vot;
};

std::vector<double> precision_thresholds();
std::vector<double> success_thresholds();

/// One-pass evaluation. Throws std::invalid_argument on length mismatch.
EvalReport otb_metrics(std::span<const BoundingBox> trajectory,
                       std::span<const BoundingBox> ground_truth);

std::string report_to_json(const EvalReport& report);
/// Two-section CSV: precision then success curve, `kind,threshold,value`.
std::string curves_to_csv(const EvalReport& report);

}  // namespace treetrack
