#include "treetrack/tracker.hpp"

#include <cmath>
#include <stdexcept>

namespace treetrack {

void TrackerConfig::validate() const {
  sampling.validate();
  initial_sgd.validate();
  online_sgd.validate();
  if (delta < 1) throw std::invalid_argument("delta must be >= 1");
  if (active_size < 1) throw std::invalid_argument("active set size must be >= 1");
  if (n_pos < 1 || n_neg < 1) throw std::invalid_argument("example counts must be >= 1");
  if (!(iou_neg < iou_pos)) throw std::invalid_argument("iou_neg must be below iou_pos");
  if (hidden < 1 || patch_size < 1) throw std::invalid_argument("hidden and patch_size must be >= 1");
  if (!(pos_sigma_xy > 0.0) || !(pos_sigma_s > 0.0) || !(neg_sigma_xy > 0.0) ||
      !(neg_sigma_s > 0.0)) {
    throw std::invalid_argument("example sampler sigmas must be positive");
  }
  if (retry_factor < 1) throw std::invalid_argument("retry_factor must be >= 1");
  if (bbr_lambda < 0.0) throw std::invalid_argument("bbr_lambda must be non-negative");
}

namespace {

BoundingBox jitter(const BoundingBox& box, double sigma_xy, double sigma_s, double scale_base,
                   RngStream& rng) {
  const double l = mean_extent(box);
  const double cx = box.center_x() + sigma_xy * l * rng.normal();
  const double cy = box.center_y() + sigma_xy * l * rng.normal();
  const double factor = std::pow(scale_base, sigma_s * rng.normal());
  return BoundingBox::from_center(cx, cy, box.w * factor, box.h * factor);
}

}  // namespace

ExampleDraw collect_examples(const Frame& frame, const BoundingBox& center, int frame_index,
                             const FeatureExtractor& extractor, const TrackerConfig& cfg,
                             RngStream& rng) {
  ExampleDraw draw;
  draw.examples.reserve(static_cast<std::size_t>(cfg.n_pos + cfg.n_neg));
  const double base = cfg.sampling.scale_base;

  const int pos_budget = cfg.retry_factor * cfg.n_pos;
  for (int tries = 0; draw.positives < cfg.n_pos && tries < pos_budget; ++tries) {
    ++draw.attempts;
    const BoundingBox b = jitter(center, cfg.pos_sigma_xy, cfg.pos_sigma_s, base, rng);
    if (!(iou(b, center) > cfg.iou_pos) || !overlaps_frame(frame, b)) continue;
    draw.examples.push_back({extractor.extract(frame, b), Label::Positive, frame_index});
    ++draw.positives;
  }
  const int neg_budget = cfg.retry_factor * cfg.n_neg;
  for (int tries = 0; draw.negatives < cfg.n_neg && tries < neg_budget; ++tries) {
    ++draw.attempts;
    const BoundingBox b = jitter(center, cfg.neg_sigma_xy, cfg.neg_sigma_s, base, rng);
    if (!(iou(b, center) < cfg.iou_neg) || !overlaps_frame(frame, b)) continue;
    draw.examples.push_back({extractor.extract(frame, b), Label::Negative, frame_index});
    ++draw.negatives;
  }
  return draw;
}

RngStream TrackerSession::rng(RngPurpose purpose, std::uint64_t index) const {
  return RngStream(config_.seed, stream_id(static_cast<std::uint32_t>(purpose), index));
}

FeatureVector TrackerSession::features_or_zero(const Frame& frame, const BoundingBox& box) const {
  if (!overlaps_frame(frame, box)) return FeatureVector::Zero(extractor_->dimension());
  return extractor_->extract(frame, box);
}

const std::vector<TrainingExample>& TrackerSession::node_examples(NodeId id) const {
  const auto it = node_examples_.find(id);
  if (it == node_examples_.end()) throw TreeError("examples not retained for node " + std::to_string(id));
  return it->second;
}

TrackerSession TrackerSession::init(const Frame& frame, const BoundingBox& gt,
                                    const TrackerConfig& config,
                                    std::shared_ptr<const FeatureExtractor> extractor) {
  config.validate();
  if (!overlaps_frame(frame, gt)) throw GeometryError("ground-truth box lies outside the frame");

  TrackerSession s;
  s.config_ = config;
  s.extractor_ = extractor ? std::move(extractor)
                           : std::make_shared<PatchExtractor>(config.patch_size, frame.channels());
  // Linear_single keeps exactly one model alive.
  const int capacity = config.mode == EstimationMode::LinearSingle ? 1 : config.active_size;
  s.tree_ = ModelTree(capacity);
  s.init_w_ = gt.w;
  s.init_h_ = gt.h;

  auto example_rng = s.rng(RngPurpose::Examples, 0);
  s.init_draw_ = collect_examples(frame, gt, 0, *s.extractor_, config, example_rng);
  if (s.init_draw_.positives == 0 || s.init_draw_.negatives == 0) {
    throw std::runtime_error("could not collect first-frame training examples");
  }

  auto init_rng = s.rng(RngPurpose::HeadInit, 0);
  auto head = AppearanceHead::random(s.extractor_->dimension(), config.hidden, init_rng);
  auto train_rng = s.rng(RngPurpose::Training, 0);
  head = train(std::move(head), std::span<const TrainingExample>(s.init_draw_.examples),
               config.initial_sgd, train_rng);
  s.tree_.add_root(std::move(head), {0});
  s.node_examples_[0] = s.init_draw_.examples;

  if (config.bbr_enabled) {
    auto bbr_rng = s.rng(RngPurpose::Regression, 0);
    const auto proposals =
        draw_candidates(box_to_state(gt, gt.w, gt.h, config.sampling.scale_base), mean_extent(gt),
                        config.sampling, bbr_rng);
    std::vector<RegressionExample> examples;
    examples.reserve(proposals.size());
    for (const auto& st : proposals) {
      const BoundingBox p = state_to_box(st, gt.w, gt.h, config.sampling.scale_base);
      if (!overlaps_frame(frame, p)) continue;
      examples.push_back({s.extractor_->extract(frame, p), p, gt});
    }
    s.regressor_ = BoxRegressor::fit(examples, config.bbr_lambda, config.bbr_iou_gate);
  }

  s.trajectory_.push_back(gt);
  s.next_frame_ = 1;
  return s;
}

BoundingBox TrackerSession::step(const Frame& frame) {
  const int t = next_frame_++;
  const double base = config_.sampling.scale_base;
  StepReport report;
  report.frame = t;

  const BoundingBox prev = trajectory_.back();
  auto cand_rng = rng(RngPurpose::Candidates, static_cast<std::uint64_t>(t));
  const auto candidates =
      draw_candidates(box_to_state(prev, init_w_, init_h_, base), mean_extent(prev),
                      config_.sampling, cand_rng);

  const auto n = static_cast<Eigen::Index>(candidates.size());
  FeatureMatrix feats = FeatureMatrix::Zero(extractor_->dimension(), n);
  std::vector<bool> valid(candidates.size(), false);
  std::vector<BoundingBox> boxes;
  boxes.reserve(candidates.size());
  bool any_valid = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    boxes.push_back(state_to_box(candidates[i], init_w_, init_h_, base));
    if (overlaps_frame(frame, boxes.back())) {
      feats.col(i) = extractor_->extract(frame, boxes.back());
      valid[i] = any_valid = true;
    }
  }

  BoundingBox estimate_box = prev;
  const auto active = tree_.active();
  report.active.assign(active.begin(), active.end());
  if (any_valid) {
    Eigen::MatrixXd scores(static_cast<Eigen::Index>(active.size()), n);
    std::vector<double> betas;
    for (std::size_t r = 0; r < active.size(); ++r) {
      const auto& node = tree_.node(active[r]);
      scores.row(static_cast<Eigen::Index>(r)) = node.head->score_batch(feats).transpose();
      betas.push_back(node.reliability);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!valid[i]) scores.col(i).setZero();
    }
    const FrameEstimate est = estimate(candidates, active, betas, std::move(scores), config_.mode);
    report.best_index = est.best_index;
    report.best_score = est.best_score;
    report.weights = est.weights;
    report.weight_fallback = est.weight_fallback;
    estimate_box = boxes[est.best_index];
    if (config_.bbr_enabled && regressor_.trained()) {
      estimate_box =
          regressor_.refine(estimate_box, feats.col(static_cast<Eigen::Index>(est.best_index)));
    }
  } else {
    report.all_candidates_invalid = true;
  }

  PendingFrame pending;
  pending.frame = t;
  pending.state_features = features_or_zero(frame, estimate_box);
  if (overlaps_frame(frame, estimate_box)) {
    auto ex_rng = rng(RngPurpose::Examples, static_cast<std::uint64_t>(t));
    auto draw = collect_examples(frame, estimate_box, t, *extractor_, config_, ex_rng);
    report.positive_shortfall = config_.n_pos - draw.positives;
    report.negative_shortfall = config_.n_neg - draw.negatives;
    pending.examples = std::move(draw.examples);
  } else {
    report.positive_shortfall = config_.n_pos;
    report.negative_shortfall = config_.n_neg;
  }
  pending_.push_back(std::move(pending));
  trajectory_.push_back(estimate_box);

  if (pending_.size() == static_cast<std::size_t>(config_.delta)) report.grown = grow();
  reports_.push_back(std::move(report));
  return estimate_box;
}

NodeId TrackerSession::grow() {
  if (pending_.size() != static_cast<std::size_t>(config_.delta)) {
    throw std::logic_error("grow requires exactly delta pending frames");
  }
  FeatureMatrix states(extractor_->dimension(), static_cast<Eigen::Index>(pending_.size()));
  std::vector<int> frames;
  for (std::size_t i = 0; i < pending_.size(); ++i) {
    states.col(static_cast<Eigen::Index>(i)) = pending_[i].state_features;
    frames.push_back(pending_[i].frame);
  }

  NodeId parent = 0;
  double parent_edge = 0.0;
  if (uses_tree_updates(config_.mode)) {
    std::map<NodeId, double> tentative;
    for (NodeId v : tree_.active()) tentative[v] = edge_score(*tree_.node(v).head, states);
    parent = select_parent(tree_, tentative);
    parent_edge = tentative.at(parent);
  } else {
    parent = tree_.active().back();
    parent_edge = edge_score(*tree_.node(parent).head, states);
  }

  std::vector<const TrainingExample*> pool;
  std::vector<TrainingExample> own;
  for (auto& p : pending_) {
    for (auto& ex : p.examples) own.push_back(std::move(ex));
  }
  for (const auto& ex : own) pool.push_back(&ex);
  for (const auto& ex : node_examples(parent)) pool.push_back(&ex);

  bool has_pos = false, has_neg = false;
  for (const auto* ex : pool) (ex->label == Label::Positive ? has_pos : has_neg) = true;

  AppearanceHead head = tree_.node(parent).head->clone();
  const auto new_id = static_cast<NodeId>(tree_.size());
  if (has_pos && has_neg) {
    auto train_rng = rng(RngPurpose::Training, static_cast<std::uint64_t>(new_id));
    head = train(std::move(head), std::span<const TrainingExample* const>(pool),
                 config_.online_sgd, train_rng);
  }
  const NodeId id = tree_.add_node(parent, std::move(head), std::move(frames), parent_edge);
  node_examples_[id] = std::move(own);

  // Only active nodes can become parents, so older example sets are dropped.
  for (auto it = node_examples_.begin(); it != node_examples_.end();) {
    it = tree_.is_active(it->first) ? std::next(it) : node_examples_.erase(it);
  }
  pending_.clear();
  return id;
}

RunResult run(std::span<const Frame> frames, const BoundingBox& first_box,
              const TrackerConfig& config, std::shared_ptr<const FeatureExtractor> extractor) {
  if (frames.empty()) throw std::invalid_argument("cannot track an empty sequence");
  auto session = TrackerSession::init(frames[0], first_box, config, std::move(extractor));
  for (std::size_t i = 1; i < frames.size(); ++i) session.step(frames[i]);
  auto trajectory = session.trajectory();
  return RunResult{std::move(trajectory), std::move(session)};
}

}  // namespace treetrack
