#include <cmath>
#include <algorithm>
#include <filesystem>
#include <numeric>
#include <nlohmann/json.hpp>

#include "doctest.h"
#include "oracles.hpp"
#include "treetrack/ablation.hpp"
#include "treetrack/metrics.hpp"
#include "treetrack/vot.hpp"

using namespace treetrack;
namespace fs = std::filesystem;

namespace {

/// Returns ground truth shifted by `offset` px, or a far-off box on listed frames.
class ScriptedTracker final : public SequenceTracker {
 public:
  ScriptedTracker(const Sequence& seq, std::vector<int> bad_frames)
      : seq_(seq), bad_(std::move(bad_frames)) {}
  void initialize(const Frame&, const BoundingBox&, int frame_index) override {
    next_ = frame_index + 1;
    inits.push_back(frame_index);
  }
  BoundingBox track(const Frame&) override {
    const int t = next_++;
    const auto& g = seq_.ground_truth[static_cast<std::size_t>(t)];
    if (std::find(bad_.begin(), bad_.end(), t) != bad_.end()) return BoundingBox(g.x + 1000, g.y, g.w, g.h);
    return g;
  }
  std::vector<int> inits;

 private:
  const Sequence& seq_;
  std::vector<int> bad_;
  int next_ = 0;
};

Sequence blank_sequence(int n) {
  Sequence s;
  s.name = "blank";
  for (int i = 0; i < n; ++i) {
    s.frames.emplace_back(8, 8, 1);
    s.ground_truth.emplace_back(1.0 + i, 1.0, 4.0, 4.0);
  }
  return s;
}

}  // namespace

TEST_CASE("threshold grids") {
  CHECK(precision_thresholds().size() == 51);
  CHECK(success_thresholds().size() == 21);
  CHECK(success_thresholds()[10] == 0.5);
}

TEST_CASE("perfect trajectory") {
  const auto seq = gen_synthetic(SynthConfig::easy(3, 20));
  const auto r = otb_metrics(seq.ground_truth, seq.ground_truth);
  CHECK(r.precision_20 == 1.0);
  CHECK(r.precision_curve[0] == 1.0);
  CHECK(r.success_curve[20] == 0.0);  // IoU 1 is not > 1
  CHECK(r.auc == doctest::Approx(20.0 / 21.0));
  CHECK(r.auc >= 0.95);
}

TEST_CASE("three-frame success example") {
  // IoUs 1, 0.6 and 0.2 with unit-height boxes along x.
  const std::vector<BoundingBox> gt{{0, 0, 10, 1}, {0, 0, 10, 1}, {0, 0, 10, 1}};
  const std::vector<BoundingBox> tr{{0, 0, 10, 1}, {0, 0, 6, 1}, {0, 0, 2, 1}};
  const auto r = otb_metrics(tr, gt);
  CHECK(r.ious[1] == doctest::Approx(0.6));
  CHECK(r.success_50 == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("metrics match a brute-force recount") {
  RngStream r(12, 0);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + static_cast<int>(r.below(60));
    std::vector<BoundingBox> tr, gt;
    std::vector<std::array<double, 4>> ta, ga;
    for (int i = 0; i < n; ++i) {
      const BoundingBox g(r.uniform(0, 100), r.uniform(0, 100), r.uniform(5, 40), r.uniform(5, 40));
      const BoundingBox t(g.x + r.normal(0, 10), g.y + r.normal(0, 10), g.w * std::exp(r.normal(0, 0.3)),
                          g.h * std::exp(r.normal(0, 0.3)));
      tr.push_back(t);
      gt.push_back(g);
      ta.push_back({t.x, t.y, t.w, t.h});
      ga.push_back({g.x, g.y, g.w, g.h});
    }
    const auto rep = otb_metrics(tr, gt);
    const auto oracle = testing::recount_curves(ta, ga);
    CHECK(rep.precision_curve == oracle.precision);
    CHECK(rep.success_curve == oracle.success);
    CHECK(rep.precision_20 == oracle.precision[20]);
    CHECK(rep.success_50 == oracle.success[10]);
  }
}

TEST_CASE("length mismatch and empty input are rejected") {
  const std::vector<BoundingBox> a{{0, 0, 1, 1}}, b{{0, 0, 1, 1}, {0, 0, 1, 1}};
  CHECK_THROWS_AS(otb_metrics(a, b), std::invalid_argument);
  CHECK_THROWS_AS(otb_metrics({}, {}), std::invalid_argument);
}

TEST_CASE("report serialization") {
  const std::vector<BoundingBox> gt{{0, 0, 10, 10}, {0, 0, 10, 10}};
  auto r = otb_metrics(gt, gt);
  r.ious[0] = std::nan("");
  const auto j = nlohmann::json::parse(report_to_json(r));
  CHECK(j["precision_20"].get<double>() == 1.0);
  CHECK(j["iou"][0].is_null());
  CHECK(j["success_curve"].size() == 21);
  const auto csv = curves_to_csv(r);
  CHECK(csv.rfind("kind,threshold,value\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 51 + 21);
}

TEST_CASE("VOT protocol with a perfect tracker") {
  const auto seq = blank_sequence(30);
  ScriptedTracker tracker(seq, {});
  const auto r = vot_evaluate(tracker, seq);
  REQUIRE(r.vot);
  CHECK(r.vot->failures == 0);
  CHECK(r.vot->accuracy == 1.0);
  CHECK(r.vot->counted_frames == 29);
  CHECK(std::isnan(r.ious[0]));
  CHECK(tracker.inits == std::vector<int>{0});
}

TEST_CASE("VOT protocol re-initializes after failures") {
  const auto seq = blank_sequence(40);
  ScriptedTracker tracker(seq, {3, 9, 37});
  const auto r = vot_evaluate(tracker, seq);
  REQUIRE(r.vot);
  // Fail at 3, restart at 8; frame 9 is tracked and fails again, restart at 14;
  // 37 fails and the restart at 42 is past the end.
  CHECK(r.vot->failure_frames == std::vector<int>{3, 9, 37});
  CHECK(r.vot->reinit_frames == std::vector<int>{8, 14});
  CHECK(tracker.inits == std::vector<int>{0, 8, 14});
  // Counted: 1, 2 then 24..36 (burn-in covers 14..23).
  CHECK(r.vot->counted_frames == 2 + 13);
  CHECK(r.vot->accuracy == 1.0);
  for (int skipped : {4, 5, 6, 7, 8, 14, 38, 39}) CHECK(std::isnan(r.ious[skipped]));
  CHECK(r.ious[3] == 0.0);
  CHECK(r.ious[15] == 1.0);
  // Curves over the tracked frames: 1,2,3,9,15..37 -> 3 failures among 27.
  CHECK(r.success_50 == doctest::Approx(24.0 / 27.0));
}

TEST_CASE("synthetic generator is deterministic and consistent") {
  const auto cfg = SynthConfig::multimodal(4, 80);
  const auto a = gen_synthetic(cfg);
  const auto b = gen_synthetic(cfg);
  CHECK(a.frames == b.frames);
  CHECK(a.ground_truth == b.ground_truth);
  REQUIRE(a.size() == 80);
  for (const auto& g : a.ground_truth) {
    CHECK(g.x >= 0);
    CHECK(g.y >= 0);
    CHECK(g.right() <= cfg.frame_width);
    CHECK(g.bottom() <= cfg.frame_height);
  }
  CHECK(cfg.appearance_modes >= 2);
  CHECK_FALSE(cfg.occlusions.empty());
  CHECK(mode_at(cfg, 0) == 0);
  CHECK(mode_at(cfg, cfg.mode_switches[0]) == 1);
  CHECK(mode_at(cfg, cfg.mode_switches[1]) == 0);
  CHECK(transition_weight(cfg, 0) == 0.0);
  const auto other = gen_synthetic(SynthConfig::multimodal(5, 80));
  CHECK_FALSE(other.frames == a.frames);
}

TEST_CASE("sequence directory round trip") {
  const auto seq = gen_synthetic(SynthConfig::easy(2, 5));
  const auto dir = (fs::temp_directory_path() / "treetrack_test_seq").string();
  fs::remove_all(dir);
  write_sequence(seq, dir);
  CHECK(fs::exists(fs::path(dir) / "000000.pgm"));
  CHECK(fs::exists(fs::path(dir) / "000004.pgm"));
  const auto back = read_sequence(dir);
  CHECK(back.frames == seq.frames);
  CHECK(back.ground_truth == seq.ground_truth);
}

TEST_CASE("ablation table covers every mode") {
  TrackerConfig cfg;
  cfg.hidden = 8;
  cfg.patch_size = 8;
  cfg.initial_sgd.iterations = 5;
  cfg.online_sgd.iterations = 2;
  cfg.n_neg = 50;
  cfg.delta = 5;
  cfg.sampling.n_candidates = 64;
  const std::vector<Sequence> seqs{gen_synthetic(SynthConfig::multimodal(1, 12))};
  const std::vector<std::uint64_t> seeds{1, 2};
  const auto table = ablate(seqs, cfg, seeds);
  REQUIRE(table.rows.size() == 5);
  for (const auto& row : table.rows) {
    CHECK(row.runs == 2);
    CHECK(row.auc >= 0.0);
    CHECK(row.auc <= 1.0);
  }
  const auto csv = table.to_csv();
  CHECK(csv.rfind("mode,precision_20,success_50,auc,runs\nLinear_single,", 0) == 0);
  CHECK(table.row(EstimationMode::TCNN).mode == EstimationMode::TCNN);
  CHECK(ablate(seqs, cfg, seeds).to_csv() == csv);
}

TEST_CASE("VOT protocol with an always-failing tracker") {
  for (int length : {2, 6, 7, 8, 13, 40, 41}) {
    const auto seq = blank_sequence(length);
    std::vector<int> all(static_cast<std::size_t>(length));
    std::iota(all.begin(), all.end(), 0);
    ScriptedTracker tracker(seq, all);
    const auto r = vot_evaluate(tracker, seq);
    // Simulation: fail on the first frame after each (re-)init, restart 5 later.
    int expected = 0;
    for (int init = 0; init + 1 < length; init = init + 1 + 5) ++expected;
    CHECK(r.vot->failures == expected);
    CHECK(r.vot->counted_frames == 0);
    CHECK(r.vot->accuracy == 0.0);
  }
}
