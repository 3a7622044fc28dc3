#pragma once

#include <optional>

#include "treetrack/metrics.hpp"
#include "treetrack/synth.hpp"
#include "treetrack/tracker.hpp"

namespace treetrack {

/// Minimal tracker surface the re-initialization protocol drives.
class SequenceTracker {
 public:
  virtual ~SequenceTracker() = default;
  virtual void initialize(const Frame& frame, const BoundingBox& box, int frame_index) = 0;
  virtual BoundingBox track(const Frame& frame) = 0;
};

/// Adapts TrackerSession. Re-initializations at frame k use seed ^ mix64(k).
class SessionTracker final : public SequenceTracker {
 public:
  explicit SessionTracker(TrackerConfig config) : config_(std::move(config)) {}
  void initialize(const Frame& frame, const BoundingBox& box, int frame_index) override;
  BoundingBox track(const Frame& frame) override;
  const std::optional<TrackerSession>& session() const { return session_; }

 private:
  TrackerConfig config_;
  std::optional<TrackerSession> session_;
};

struct VotProtocol {
  int reinit_delay = 5;  // frames between a failure and the re-initialization
  int burn_in = 10;      // frames from each re-init excluded from accuracy
};

/// A frame with IoU == 0 is a failure; the tracker restarts from ground truth
/// reinit_delay frames later. Initialization frames and skipped frames carry
/// NaN overlaps; failure frames and burn-in frames are excluded from accuracy.
EvalReport vot_evaluate(SequenceTracker& tracker, const Sequence& seq,
                        const VotProtocol& protocol = {});
EvalReport vot_run(const TrackerConfig& config, const Sequence& seq,
                   const VotProtocol& protocol = {});

}  // namespace treetrack
