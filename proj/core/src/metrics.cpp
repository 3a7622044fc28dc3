#include "treetrack/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace treetrack {

std::vector<double> precision_thresholds() {
  std::vector<double> t;
  for (int k = 0; k <= 50; ++k) t.push_back(k);
  return t;
}

std::vector<double> success_thresholds() {
  std::vector<double> t;
  for (int k = 0; k <= 20; ++k) t.push_back(k / 20.0);
  return t;
}

EvalReport otb_metrics(std::span<const BoundingBox> trajectory,
                       std::span<const BoundingBox> ground_truth) {
  if (trajectory.size() != ground_truth.size()) {
    throw std::invalid_argument("trajectory has " + std::to_string(trajectory.size()) +
                                " boxes but ground truth has " +
                                std::to_string(ground_truth.size()));
  }
  if (trajectory.empty()) throw std::invalid_argument("cannot evaluate an empty trajectory");

  EvalReport r;
  r.precision_thresholds = precision_thresholds();
  r.success_thresholds = success_thresholds();
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    r.ious.push_back(iou(trajectory[i], ground_truth[i]));
    r.center_errors.push_back(center_error(trajectory[i], ground_truth[i]));
  }
  const double n = static_cast<double>(trajectory.size());
  for (double theta : r.precision_thresholds) {
    std::size_t hits = 0;
    for (double e : r.center_errors) hits += e <= theta ? 1 : 0;
    r.precision_curve.push_back(hits / n);
  }
  for (double tau : r.success_thresholds) {
    std::size_t hits = 0;
    for (double o : r.ious) hits += o > tau ? 1 : 0;
    r.success_curve.push_back(hits / n);
  }
  r.precision_20 = r.precision_curve[20];
  r.success_50 = r.success_curve[10];
  double sum = 0.0;
  for (double v : r.success_curve) sum += v;
  r.auc = sum / static_cast<double>(r.success_curve.size());
  return r;
}

std::string report_to_json(const EvalReport& r) {
  nlohmann::json j;
  j["precision_20"] = r.precision_20;
  j["success_50"] = r.success_50;
  j["auc"] = r.auc;
  j["precision_thresholds"] = r.precision_thresholds;
  j["precision_curve"] = r.precision_curve;
  j["success_thresholds"] = r.success_thresholds;
  j["success_curve"] = r.success_curve;
  // NaN entries (untracked VOT frames) serialize as null.
  j["iou"] = r.ious;
  j["center_error"] = r.center_errors;
  if (r.vot) {
    j["vot"] = {{"accuracy", r.vot->accuracy},
                {"failures", r.vot->failures},
                {"counted_frames", r.vot->counted_frames},
                {"failure_frames", r.vot->failure_frames},
                {"reinit_frames", r.vot->reinit_frames}};
  }
  return j.dump(2) + "\n";
}

std::string curves_to_csv(const EvalReport& r) {
  std::string out = "kind,threshold,value\n";
  char line[96];
  for (std::size_t i = 0; i < r.precision_curve.size(); ++i) {
    std::snprintf(line, sizeof(line), "precision,%.2f,%.6f\n", r.precision_thresholds[i],
                  r.precision_curve[i]);
    out += line;
  }
  for (std::size_t i = 0; i < r.success_curve.size(); ++i) {
    std::snprintf(line, sizeof(line), "success,%.2f,%.6f\n", r.success_thresholds[i],
                  r.success_curve[i]);
    out += line;
  }
  return out;
}

}  // namespace treetrack
