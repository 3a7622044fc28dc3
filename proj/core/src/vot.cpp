#include "treetrack/vot.hpp"

#include <cmath>
#include <limits>

namespace treetrack {

void SessionTracker::initialize(const Frame& frame, const BoundingBox& box, int frame_index) {
  TrackerConfig cfg = config_;
  if (frame_index != 0) cfg.seed = config_.seed ^ mix64(static_cast<std::uint64_t>(frame_index));
  session_.reset();
  session_.emplace(TrackerSession::init(frame, box, cfg));
}

BoundingBox SessionTracker::track(const Frame& frame) {
  if (!session_) throw std::logic_error("tracker used before initialization");
  return session_->step(frame);
}

EvalReport vot_evaluate(SequenceTracker& tracker, const Sequence& seq, const VotProtocol& protocol) {
  seq.validate();
  const int length = static_cast<int>(seq.size());
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  EvalReport report;
  report.precision_thresholds = precision_thresholds();
  report.success_thresholds = success_thresholds();
  report.ious.assign(static_cast<std::size_t>(length), kNaN);
  report.center_errors.assign(static_cast<std::size_t>(length), kNaN);
  VotSummary vot;

  tracker.initialize(seq.frames[0], seq.ground_truth[0], 0);
  int burn_in_end = -1;  // last excluded frame of the current burn-in window
  double overlap_sum = 0.0;
  int t = 1;
  while (t < length) {
    const BoundingBox box = tracker.track(seq.frames[static_cast<std::size_t>(t)]);
    const double o = iou(box, seq.ground_truth[static_cast<std::size_t>(t)]);
    report.ious[static_cast<std::size_t>(t)] = o;
    report.center_errors[static_cast<std::size_t>(t)] =
        center_error(box, seq.ground_truth[static_cast<std::size_t>(t)]);
    if (o <= 0.0) {
      ++vot.failures;
      vot.failure_frames.push_back(t);
      const int restart = t + protocol.reinit_delay;
      if (restart >= length) break;
      tracker.initialize(seq.frames[static_cast<std::size_t>(restart)],
                         seq.ground_truth[static_cast<std::size_t>(restart)], restart);
      vot.reinit_frames.push_back(restart);
      burn_in_end = restart + protocol.burn_in - 1;
      t = restart + 1;
      continue;
    }
    if (t > burn_in_end) {
      overlap_sum += o;
      ++vot.counted_frames;
    }
    ++t;
  }
  vot.accuracy = vot.counted_frames > 0 ? overlap_sum / vot.counted_frames : 0.0;

  // Curves over tracked frames only.
  std::size_t tracked = 0;
  std::vector<std::size_t> p_hits(report.precision_thresholds.size(), 0);
  std::vector<std::size_t> s_hits(report.success_thresholds.size(), 0);
  for (std::size_t i = 0; i < report.ious.size(); ++i) {
    if (std::isnan(report.ious[i])) continue;
    ++tracked;
    for (std::size_t k = 0; k < p_hits.size(); ++k) {
      p_hits[k] += report.center_errors[i] <= report.precision_thresholds[k] ? 1 : 0;
    }
    for (std::size_t k = 0; k < s_hits.size(); ++k) {
      s_hits[k] += report.ious[i] > report.success_thresholds[k] ? 1 : 0;
    }
  }
  const double denom = tracked > 0 ? static_cast<double>(tracked) : 1.0;
  for (auto h : p_hits) report.precision_curve.push_back(h / denom);
  for (auto h : s_hits) report.success_curve.push_back(h / denom);
  report.precision_20 = report.precision_curve[20];
  report.success_50 = report.success_curve[10];
  double sum = 0.0;
  for (double v : report.success_curve) sum += v;
  report.auc = sum / static_cast<double>(report.success_curve.size());
  report.vot = std::move(vot);
  return report;
}

EvalReport vot_run(const TrackerConfig& config, const Sequence& seq, const VotProtocol& protocol) {
  SessionTracker tracker(config);
  return vot_evaluate(tracker, seq, protocol);
}

}  // namespace treetrack
