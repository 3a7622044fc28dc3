#include "doctest.h"
#include "oracles.hpp"
#include "treetrack/tracker.hpp"
#include "treetrack/synth.hpp"

using namespace treetrack;

namespace {

TrackerConfig small_config(EstimationMode mode = EstimationMode::TCNN) {
  TrackerConfig cfg;
  cfg.mode = mode;
  cfg.hidden = 16;
  cfg.patch_size = 8;
  cfg.sampling.n_candidates = 64;
  cfg.n_pos = 20;
  cfg.n_neg = 40;
  cfg.initial_sgd.iterations = 10;
  cfg.online_sgd.iterations = 3;
  cfg.seed = 3;
  return cfg;
}

}  // namespace

TEST_CASE("node count follows the growth schedule") {
  const auto seq = gen_synthetic(SynthConfig::easy(1, 101));
  const auto cfg = small_config();
  auto session = TrackerSession::init(seq.frames[0], seq.ground_truth[0], cfg);
  CHECK(session.tree().size() == 1);
  for (int t = 1; t <= 100; ++t) {
    session.step(seq.frames[static_cast<std::size_t>(t)]);
    CHECK(session.tree().size() == static_cast<std::size_t>(1 + t / cfg.delta));
  }
  CHECK(session.trajectory().size() == 101);
  CHECK(session.pending_frames() == 0);
}

TEST_CASE("reliabilities equal the path minimum after a run") {
  const auto seq = gen_synthetic(SynthConfig::multimodal(2, 61));
  const auto result = run(seq.frames, seq.ground_truth[0], small_config());
  const auto& tree = result.session.tree();
  std::vector<std::optional<int>> parent;
  std::vector<double> edge;
  for (const auto& n : tree.nodes()) {
    parent.push_back(n.parent);
    edge.push_back(n.edge_score);
  }
  for (const auto& n : tree.nodes()) CHECK(n.reliability == testing::path_minimum(parent, edge, n.id));
  CHECK(tree.node(1).frames == std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
}

TEST_CASE("active set capacity") {
  const auto seq = gen_synthetic(SynthConfig::easy(3, 31));
  auto single = run(seq.frames, seq.ground_truth[0], small_config(EstimationMode::LinearSingle)).session;
  CHECK(single.tree().size() == 4);
  CHECK(single.tree().active().size() == 1);
  CHECK(single.tree().active()[0] == 3);
  for (const auto& r : single.reports()) CHECK(r.active.size() == 1);

  auto cfg = small_config();
  cfg.delta = 2;
  cfg.online_sgd.iterations = 1;
  const auto tcnn = run(std::span(seq.frames).first(25), seq.ground_truth[0], cfg).session;
  CHECK(tcnn.tree().size() == 13);
  CHECK(tcnn.tree().active().size() == 10);
  CHECK(tcnn.retained_nodes() == 10);
}

TEST_CASE("linear modes chain to the newest node") {
  const auto seq = gen_synthetic(SynthConfig::easy(4, 31));
  const auto s = run(seq.frames, seq.ground_truth[0], small_config(EstimationMode::LinearMean)).session;
  for (const auto& n : s.tree().nodes()) {
    if (n.parent) CHECK(*n.parent == n.id - 1);
  }
}

TEST_CASE("runs are deterministic for a fixed seed") {
  const auto seq = gen_synthetic(SynthConfig::easy(5, 21));
  const auto a = run(seq.frames, seq.ground_truth[0], small_config());
  const auto b = run(seq.frames, seq.ground_truth[0], small_config());
  CHECK(a.trajectory == b.trajectory);
  CHECK(a.session.tree().size() == b.session.tree().size());
  for (std::size_t i = 0; i < a.session.tree().size(); ++i) {
    CHECK(*a.session.tree().node(static_cast<NodeId>(i)).head ==
          *b.session.tree().node(static_cast<NodeId>(i)).head);
  }
  auto other = small_config();
  other.seed = 4;
  CHECK_FALSE(run(seq.frames, seq.ground_truth[0], other).trajectory == a.trajectory);
}

TEST_CASE("a single-frame run returns the initial box") {
  const auto seq = gen_synthetic(SynthConfig::easy(6, 1));
  const auto r = run(seq.frames, seq.ground_truth[0], small_config());
  REQUIRE(r.trajectory.size() == 1);
  CHECK(r.trajectory[0] == seq.ground_truth[0]);
  CHECK(r.session.tree().size() == 1);
}

TEST_CASE("example collection honors IoU gates") {
  const auto seq = gen_synthetic(SynthConfig::easy(7, 1));
  const PatchExtractor ex(8, 1);
  const auto cfg = small_config();
  RngStream rng(1, 2);
  const auto draw = collect_examples(seq.frames[0], seq.ground_truth[0], 0, ex, cfg, rng);
  CHECK(draw.positives == cfg.n_pos);
  CHECK(draw.negatives == cfg.n_neg);
  CHECK(draw.examples.size() == static_cast<std::size_t>(cfg.n_pos + cfg.n_neg));
  for (const auto& e : draw.examples) CHECK(e.features.size() == ex.dimension());
}

TEST_CASE("invalid configurations are rejected") {
  auto cfg = small_config();
  cfg.delta = 0;
  CHECK_THROWS(cfg.validate());
  cfg = small_config();
  cfg.iou_neg = 0.8;  // above iou_pos
  CHECK_THROWS(cfg.validate());
  const auto seq = gen_synthetic(SynthConfig::easy(8, 1));
  CHECK_THROWS(TrackerSession::init(seq.frames[0], BoundingBox(500, 500, 10, 10), small_config()));
}

TEST_CASE("root head separates the first-frame pools") {
  const auto seq = gen_synthetic(SynthConfig::easy(9, 1));
  auto cfg = small_config();
  cfg.hidden = 32;
  cfg.n_neg = 200;
  cfg.n_pos = 50;
  cfg.initial_sgd = SgdHyper::initial();
  const auto s = TrackerSession::init(seq.frames[0], seq.ground_truth[0], cfg);
  const auto& head = *s.tree().node(0).head;
  double pos = 0, neg = 0;
  int np = 0, nn = 0;
  for (const auto& e : s.initial_examples().examples) {
    if (e.label == Label::Positive) {
      pos += head.score(e.features);
      ++np;
    } else {
      neg += head.score(e.features);
      ++nn;
    }
  }
  CHECK(pos / np > neg / nn);
  CHECK(s.trajectory().size() == 1);
  CHECK(s.tree().active().size() == 1);
}
