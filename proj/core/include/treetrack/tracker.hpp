#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "treetrack/appearance.hpp"
#include "treetrack/bbox_regression.hpp"
#include "treetrack/estimator.hpp"
#include "treetrack/features.hpp"
#include "treetrack/model_tree.hpp"
#include "treetrack/sampling.hpp"

namespace treetrack {

struct TrackerConfig {
  SamplingConfig sampling;
  SgdHyper initial_sgd = SgdHyper::initial();
  SgdHyper online_sgd = SgdHyper::online();
  int delta = 10;        // frames per new node
  int active_size = 10;  // K
  int n_pos = 50;
  int n_neg = 200;
  double iou_pos = 0.7;
  double iou_neg = 0.5;
  EstimationMode mode = EstimationMode::TCNN;
  bool bbr_enabled = true;
  double bbr_lambda = BoxRegressor::kDefaultLambda;
  double bbr_iou_gate = BoxRegressor::kDefaultIouGate;
  int hidden = 512;
  int patch_size = 16;
  std::uint64_t seed = 0;

  // Example sampler: jitter around the estimated box, then IoU-gated.
  double pos_sigma_xy = 0.1;  // fraction of the box extent
  double pos_sigma_s = 0.5;
  double neg_sigma_xy = 1.0;
  double neg_sigma_s = 1.0;
  int retry_factor = 50;  // attempts allowed per requested example

  void validate() const;
};

/// RNG purposes; combined with a frame or node index via stream_id().
enum class RngPurpose : std::uint32_t {
  Candidates = 1,
  Examples = 2,
  Training = 3,
  HeadInit = 4,
  Regression = 5,
};

struct ExampleDraw {
  std::vector<TrainingExample> examples;
  int positives = 0;
  int negatives = 0;
  int attempts = 0;
};

/// Rejection-samples n_pos boxes with IoU > iou_pos and n_neg with
/// IoU < iou_neg around `center`, returning their features. Stops after
/// retry_factor * count attempts per class; a shortfall is reported in the
/// counts rather than raised.
ExampleDraw collect_examples(const Frame& frame, const BoundingBox& center, int frame_index,
                             const FeatureExtractor& extractor, const TrackerConfig& cfg,
                             RngStream& rng);

struct StepReport {
  int frame = 0;
  bool all_candidates_invalid = false;
  bool weight_fallback = false;
  int positive_shortfall = 0;
  int negative_shortfall = 0;
  std::size_t best_index = 0;
  double best_score = 0.0;
  std::vector<NodeId> active;
  std::vector<double> weights;
  std::optional<NodeId> grown;
};

/// One online tracking run: candidate scoring against the active heads,
/// optional box refinement, per-frame example collection, and tree growth
/// every `delta` frames.
class TrackerSession {
 public:
  static TrackerSession init(const Frame& frame, const BoundingBox& ground_truth,
                             const TrackerConfig& config,
                             std::shared_ptr<const FeatureExtractor> extractor = nullptr);

  BoundingBox step(const Frame& frame);

  /// Adds a node from the pending frames. Requires exactly `delta` of them;
  /// step() calls this automatically.
  NodeId grow();

  const TrackerConfig& config() const { return config_; }
  const ModelTree& tree() const { return tree_; }
  const BoxRegressor& regressor() const { return regressor_; }
  const FeatureExtractor& extractor() const { return *extractor_; }
  const std::vector<BoundingBox>& trajectory() const { return trajectory_; }
  const std::vector<StepReport>& reports() const { return reports_; }
  std::size_t pending_frames() const { return pending_.size(); }
  const std::vector<TrainingExample>& node_examples(NodeId id) const;
  /// Number of nodes whose example sets are still retained.
  std::size_t retained_nodes() const { return node_examples_.size(); }
  const ExampleDraw& initial_examples() const { return init_draw_; }

 private:
  struct PendingFrame {
    int frame = 0;
    FeatureVector state_features;
    std::vector<TrainingExample> examples;
  };

  TrackerSession() = default;
  RngStream rng(RngPurpose purpose, std::uint64_t index) const;
  FeatureVector features_or_zero(const Frame& frame, const BoundingBox& box) const;

  TrackerConfig config_;
  std::shared_ptr<const FeatureExtractor> extractor_;
  ModelTree tree_;
  BoxRegressor regressor_;
  double init_w_ = 1.0;
  double init_h_ = 1.0;
  int next_frame_ = 0;
  std::vector<BoundingBox> trajectory_;
  std::vector<PendingFrame> pending_;
  std::map<NodeId, std::vector<TrainingExample>> node_examples_;
  std::vector<StepReport> reports_;
  ExampleDraw init_draw_;
};

struct RunResult {
  std::vector<BoundingBox> trajectory;
  TrackerSession session;
};

/// init on frames[0], step through the rest.
RunResult run(std::span<const Frame> frames, const BoundingBox& first_box,
              const TrackerConfig& config,
              std::shared_ptr<const FeatureExtractor> extractor = nullptr);

}  // namespace treetrack
