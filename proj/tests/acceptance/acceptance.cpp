// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (0 when all pass).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "gradient_check.hpp"
#include "oracles.hpp"
#include "treetrack/ablation.hpp"
#include "treetrack/bbox_regression.hpp"
#include "treetrack/estimator.hpp"
#include "treetrack/metrics.hpp"
#include "treetrack/model_tree.hpp"
#include "treetrack/sampling.hpp"
#include "treetrack/synth.hpp"
#include "treetrack/tracker.hpp"

using namespace treetrack;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

AppearanceHead tiny_head() { return AppearanceHead(2, 1); }

// 1. Cached beta equals the brute-force path minimum on 1000 random trees.
Outcome reliability_oracle() {
  const auto t0 = Clock::now();
  RngStream rng(101, 0);
  long checked = 0, mismatched = 0;
  for (int t = 0; t < 1000; ++t) {
    const int n = 1 + static_cast<int>(rng.below(100));
    ModelTree tree(1 + static_cast<int>(rng.below(12)));
    tree.add_root(tiny_head(), {0});
    std::vector<std::optional<int>> parent{std::nullopt};
    std::vector<double> edge{1.0};
    for (int i = 1; i < n; ++i) {
      const int p = static_cast<int>(rng.below(static_cast<std::uint64_t>(i)));
      const double s = rng.uniform();
      tree.add_node(p, tiny_head(), {i}, s);
      parent.push_back(p);
      edge.push_back(s);
    }
    for (int v = 0; v < n; ++v) {
      ++checked;
      if (tree.reliability(v) != testing::path_minimum(parent, edge, v)) ++mismatched;
    }
  }
  const double secs = seconds_since(t0);
  return {mismatched == 0 && secs < 10.0,
          std::to_string(checked) + " nodes, " + std::to_string(mismatched) + " mismatches, " +
              fmt("%.2f s (limit 10 s)", secs)};
}

// 2. TCNN weights sum to one; fallback iff every min(alpha, beta) is zero.
Outcome weight_normalization() {
  RngStream rng(202, 0);
  double worst = 0.0;
  int fallback_errors = 0, fallbacks = 0;
  for (int t = 0; t < 10000; ++t) {
    const int k = 1 + static_cast<int>(rng.below(10));
    std::vector<double> a(k), b(k);
    bool all_zero = true;
    for (int j = 0; j < k; ++j) {
      // Zeros are common so the fallback path is exercised.
      a[j] = rng.below(3) == 0 ? 0.0 : rng.uniform();
      b[j] = rng.below(3) == 0 ? 0.0 : rng.uniform();
      all_zero &= std::min(a[j], b[j]) == 0.0;
    }
    const auto w = weights(a, b, EstimationMode::TCNN);
    worst = std::max(worst, std::abs(std::accumulate(w.weights.begin(), w.weights.end(), 0.0) - 1.0));
    fallbacks += w.fallback ? 1 : 0;
    if (w.fallback != all_zero) ++fallback_errors;
  }
  return {worst <= 1e-9 && fallback_errors == 0,
          fmt("max |sum-1| = %.3g (tol 1e-9), ", worst) + std::to_string(fallbacks) +
              " fallbacks, " + std::to_string(fallback_errors) + " fallback mismatches"};
}

// 3. Analytic gradient vs central differences, 100 trials.
Outcome gradient_check() {
  const auto t0 = Clock::now();
  int trials = 0, skipped = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; trials < 100; ++seed) {
    const auto r = testing::gradient_trial(1000 + seed, 1e-4);
    if (r.skipped) {
      ++skipped;
      continue;
    }
    ++trials;
    worst = std::max(worst, r.max_rel_error);
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-4 && secs < 30.0,
          fmt("max rel err %.3g (tol 1e-4) over 100 trials, ", worst) + std::to_string(skipped) +
              " near-kink draws redrawn, " + fmt("%.2f s (limit 30 s)", secs)};
}

// 4. select_parent against the exhaustive oracle on 10000 active sets.
Outcome parent_selection() {
  RngStream rng(404, 0);
  int mismatches = 0, ties = 0;
  for (int t = 0; t < 10000; ++t) {
    const int n = 1 + static_cast<int>(rng.below(25));
    ModelTree tree(1 + static_cast<int>(rng.below(10)));
    tree.add_root(tiny_head(), {0});
    std::vector<std::optional<int>> parent{std::nullopt};
    std::vector<double> edge{1.0};
    for (int i = 1; i < n; ++i) {
      const int p = static_cast<int>(rng.below(static_cast<std::uint64_t>(i)));
      const double s = static_cast<double>(rng.below(9)) / 8.0;  // coarse grid forces ties
      tree.add_node(p, tiny_head(), {i}, s);
      parent.push_back(p);
      edge.push_back(s);
    }
    std::map<NodeId, double> scores;
    std::vector<int> active;
    std::vector<double> score, beta;
    for (NodeId v : tree.active()) {
      const double s = rng.below(2) == 0 ? static_cast<double>(rng.below(9)) / 8.0 : rng.uniform();
      scores[v] = s;
      active.push_back(v);
      score.push_back(s);
      beta.push_back(testing::path_minimum(parent, edge, v));
    }
    std::vector<double> m;
    for (std::size_t i = 0; i < score.size(); ++i) m.push_back(std::min(score[i], beta[i]));
    const double best = *std::max_element(m.begin(), m.end());
    ties += std::count(m.begin(), m.end(), best) > 1 ? 1 : 0;
    if (select_parent(tree, scores) != testing::exhaustive_parent(active, score, beta)) ++mismatches;
  }
  return {mismatches == 0,
          std::to_string(mismatches) + " mismatches over 10000 sets (" + std::to_string(ties) +
              " with ties)"};
}

// 5. Node count after init + T frames is 1 + floor(T / delta).
Outcome growth_schedule() {
  TrackerConfig cfg;  // delta = 10
  // The schedule does not depend on head width; a narrow head keeps this fast.
  cfg.hidden = 32;
  const auto seq = gen_synthetic(SynthConfig::easy(5, 101));
  std::string detail;
  bool ok = true;
  for (int T : {1, 9, 10, 25, 100}) {
    const auto r = run(std::span(seq.frames).first(static_cast<std::size_t>(T) + 1),
                       seq.ground_truth[0], cfg);
    const auto got = r.session.tree().size();
    const auto want = static_cast<std::size_t>(1 + T / cfg.delta);
    ok &= got == want;
    detail += "T=" + std::to_string(T) + ":" + std::to_string(got) + "/" + std::to_string(want) + " ";
  }
  return {ok, detail + "(got/expected)"};
}

// 6. Ridge solve vs normal equations; refinement does not lower mean IoU.
Outcome ridge_regressor() {
  RngStream rng(606, 0);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const int d = 1 + static_cast<int>(rng.below(16));
    const int n = 1 + static_cast<int>(rng.below(64));
    const double lambda = std::pow(10.0, rng.uniform(-3, 3));
    Eigen::MatrixXd x(n, d);
    Eigen::VectorXd y(n);
    std::vector<double> xr, yr;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) {
        x(i, j) = rng.normal();
        xr.push_back(x(i, j));
      }
      y[i] = rng.normal();
      yr.push_back(y[i]);
    }
    const auto w = ridge_solve(x, y, lambda);
    const auto o = testing::normal_equations(xr, yr, static_cast<std::size_t>(n),
                                             static_cast<std::size_t>(d), lambda);
    for (int j = 0; j < d; ++j) worst = std::max(worst, std::abs(w[j] - o[static_cast<std::size_t>(j)]));
  }

  // Fit on first-frame proposals, evaluate on perturbed proposals of the next frame.
  const PatchExtractor ex(16, 1);
  double pre_sum = 0.0, post_sum = 0.0;
  int improved = 0;
  for (int t = 0; t < 100; ++t) {
    const auto seq = gen_synthetic(SynthConfig::easy(100 + static_cast<std::uint64_t>(t), 2));
    const BoundingBox g0 = seq.ground_truth[0];
    RngStream prop(static_cast<std::uint64_t>(t), stream_id(5, 0));
    std::vector<RegressionExample> train;
    for (const auto& s : draw_candidates(box_to_state(g0, g0.w, g0.h), mean_extent(g0), SamplingConfig{}, prop)) {
      const BoundingBox b = state_to_box(s, g0.w, g0.h);
      if (overlaps_frame(seq.frames[0], b)) train.push_back({ex.extract(seq.frames[0], b), b, g0});
    }
    const auto reg = BoxRegressor::fit(train);
    const BoundingBox g1 = seq.ground_truth[1];
    RngStream jit(static_cast<std::uint64_t>(t), 77);
    double pre = 0.0, post = 0.0;
    for (int i = 0; i < 100; ++i) {
      const BoundingBox b(g1.x + 0.1 * g1.w * jit.normal(), g1.y + 0.1 * g1.h * jit.normal(),
                          g1.w * std::exp(0.1 * jit.normal()), g1.h * std::exp(0.1 * jit.normal()));
      pre += iou(b, g1);
      post += iou(reg.refine(b, ex.extract(seq.frames[1], b)), g1);
    }
    pre_sum += pre / 100.0;
    post_sum += post / 100.0;
    improved += post >= pre ? 1 : 0;
  }
  const double pre_mean = pre_sum / 100.0, post_mean = post_sum / 100.0;
  return {worst <= 1e-8 && post_mean >= pre_mean,
          fmt("max |w - oracle| = %.3g (tol 1e-8); ", worst) + fmt("mean IoU %.4f -> ", pre_mean) +
              fmt("%.4f, ", post_mean) + std::to_string(improved) + "/100 trials not worse"};
}

// 7. otb_metrics vs brute-force recount; perfect trajectory summary.
Outcome metric_oracle() {
  RngStream rng(707, 0);
  int mismatches = 0;
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + static_cast<int>(rng.below(200));
    std::vector<BoundingBox> tr, gt;
    std::vector<std::array<double, 4>> ta, ga;
    for (int i = 0; i < n; ++i) {
      const BoundingBox g(rng.uniform(0, 200), rng.uniform(0, 200), rng.uniform(5, 60), rng.uniform(5, 60));
      const double spread = rng.uniform(0, 40);
      const BoundingBox b(g.x + spread * rng.normal(), g.y + spread * rng.normal(),
                          g.w * std::exp(0.3 * rng.normal()), g.h * std::exp(0.3 * rng.normal()));
      tr.push_back(b);
      gt.push_back(g);
      ta.push_back({b.x, b.y, b.w, b.h});
      ga.push_back({g.x, g.y, g.w, g.h});
    }
    const auto rep = otb_metrics(tr, gt);
    const auto o = testing::recount_curves(ta, ga);
    const double auc = std::accumulate(o.success.begin(), o.success.end(), 0.0) / 21.0;
    if (rep.precision_curve != o.precision || rep.success_curve != o.success ||
        rep.precision_20 != o.precision[20] || rep.success_50 != o.success[10] ||
        std::abs(rep.auc - auc) > 1e-15) {
      ++mismatches;
    }
  }
  const auto seq = gen_synthetic(SynthConfig::easy(7, 60));
  const auto perfect = otb_metrics(seq.ground_truth, seq.ground_truth);
  return {mismatches == 0 && perfect.precision_20 == 1.0 && perfect.auc >= 0.95,
          std::to_string(mismatches) + " mismatches over 100 trajectories; perfect: precision@20=" +
              fmt("%.3f", perfect.precision_20) + fmt(" AUC=%.4f (>= 0.95)", perfect.auc)};
}

// 8. End-to-end on the easy sequence with the default configuration.
Outcome end_to_end() {
  const auto t0 = Clock::now();
  const auto seq = gen_synthetic(SynthConfig::easy(1, 60));
  const auto r = run(seq.frames, seq.ground_truth[0], TrackerConfig{});
  const auto rep = otb_metrics(r.trajectory, seq.ground_truth);
  double sum = 0.0;
  for (std::size_t i = 1; i < rep.ious.size(); ++i) sum += rep.ious[i];
  const double mean_iou = sum / static_cast<double>(rep.ious.size() - 1);
  const double secs = seconds_since(t0);
  return {mean_iou > 0.5 && secs < 60.0,
          fmt("mean IoU %.4f (> 0.5) over frames 1..59, ", mean_iou) + fmt("%.1f s (limit 60 s)", secs)};
}

// 9. Ablation ordering over 20 multi-modal sequences.
Outcome ablation_ordering() {
  const auto t0 = Clock::now();
  std::vector<Sequence> seqs;
  for (int s = 0; s < 20; ++s) seqs.push_back(gen_synthetic(SynthConfig::multimodal(1000 + static_cast<std::uint64_t>(s), 80)));
  TrackerConfig base;
  // Narrower heads keep 100 runs inside the time budget on one core.
  base.hidden = 128;
  const std::vector<std::uint64_t> seeds{7};
  const auto table = ablate(seqs, base, seeds);
  const double tcnn = table.row(EstimationMode::TCNN).auc;
  const double single = table.row(EstimationMode::LinearSingle).auc;
  const double tree_mean = table.row(EstimationMode::TreeMean).auc;
  const double linear_mean = table.row(EstimationMode::LinearMean).auc;
  const double secs = seconds_since(t0);
  std::string detail;
  for (const auto& row : table.rows) detail += to_string(row.mode) + fmt("=%.4f ", row.auc);
  return {tcnn >= single && tree_mean >= linear_mean - 0.02 && secs < 900.0,
          "AUC " + detail + fmt("; %.0f s (limit 900 s)", secs)};
}

// 10. Two CLI runs of `track --seed 7` give byte-identical files.
Outcome cli_determinism() {
  const fs::path dir = fs::temp_directory_path() / "treetrack_acceptance_cli";
  fs::remove_all(dir);
  auto call = [](std::vector<std::string> args) {
    args.insert(args.begin(), "treetrack");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  };
  auto slurp = [](const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
  };
  {
    std::ofstream(dir.string() + ".cfg") << "length = 25\n";
  }
  const std::string cfg = dir.string() + ".cfg";
  int rc = call({"synth", "--config", cfg, "--seed", "3", "--out", (dir / "seq").string()});
  for (const char* name : {"a", "b"}) {
    rc |= call({"track", "--sequence", (dir / "seq").string(), "--seed", "7", "--snapshot", "--out",
                (dir / name).string()});
  }
  const auto ta = slurp(dir / "a" / "trajectory.txt"), tb = slurp(dir / "b" / "trajectory.txt");
  const auto sa = slurp(dir / "a" / "tree.json"), sb = slurp(dir / "b" / "tree.json");
  const bool same = rc == 0 && !ta.empty() && !sa.empty() && ta == tb && sa == sb;
  return {same, "exit codes " + std::string(rc == 0 ? "0" : "nonzero") + ", trajectory " +
                    std::to_string(ta.size()) + " B " + (ta == tb ? "identical" : "differs") +
                    ", snapshot " + std::to_string(sa.size()) + " B " + (sa == sb ? "identical" : "differs")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"reliability oracle", reliability_oracle},
      {"weight normalization", weight_normalization},
      {"gradient check", gradient_check},
      {"parent selection", parent_selection},
      {"growth schedule", growth_schedule},
      {"ridge regressor", ridge_regressor},
      {"metric oracle", metric_oracle},
      {"end-to-end smoke", end_to_end},
      {"ablation ordering", ablation_ordering},
      {"CLI determinism", cli_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": "
              << o.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed;
}
