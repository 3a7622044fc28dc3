#include <benchmark/benchmark.h>

#include "treetrack/appearance.hpp"
#include "treetrack/geometry.hpp"
#include "treetrack/synth.hpp"
#include "treetrack/tracker.hpp"

using namespace treetrack;

static void BM_Iou(benchmark::State& state) {
  RngStream r(1, 1);
  std::vector<BoundingBox> boxes;
  for (int i = 0; i < 1024; ++i) boxes.emplace_back(r.uniform(0, 50), r.uniform(0, 50), 10 + r.uniform(0, 10), 10);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(iou(boxes[i & 1023], boxes[(i + 1) & 1023]));
    ++i;
  }
}
BENCHMARK(BM_Iou);

static void BM_ScoreBatch(benchmark::State& state) {
  const int hidden = static_cast<int>(state.range(0));
  RngStream r(2, 2);
  const auto head = AppearanceHead::random(256, hidden, r);
  FeatureMatrix x(256, 256);
  for (Eigen::Index k = 0; k < x.size(); ++k) x.data()[k] = r.normal();
  for (auto _ : state) benchmark::DoNotOptimize(head.score_batch(x));
  state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_ScoreBatch)->Arg(128)->Arg(512)->Unit(benchmark::kMicrosecond);

static void BM_OnlineTraining(benchmark::State& state) {
  const int hidden = static_cast<int>(state.range(0));
  RngStream r(3, 3);
  std::vector<TrainingExample> pool;
  for (int i = 0; i < 500; ++i) {
    FeatureVector f(256);
    for (int k = 0; k < 256; ++k) f[k] = r.normal();
    pool.push_back({f, i < 100 ? Label::Positive : Label::Negative, 0});
  }
  const auto head = AppearanceHead::random(256, hidden, r);
  for (auto _ : state) {
    RngStream rng(4, 4);
    benchmark::DoNotOptimize(train(head, pool, SgdHyper::online(), rng));
  }
}
BENCHMARK(BM_OnlineTraining)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_TrackerStep(benchmark::State& state) {
  TrackerConfig cfg;
  cfg.hidden = static_cast<int>(state.range(0));
  const auto seq = gen_synthetic(SynthConfig::easy(1, 10));
  for (auto _ : state) {
    state.PauseTiming();
    auto session = TrackerSession::init(seq.frames[0], seq.ground_truth[0], cfg);
    state.ResumeTiming();
    for (std::size_t t = 1; t < 10; ++t) benchmark::DoNotOptimize(session.step(seq.frames[t]));
  }
  state.SetItemsProcessed(state.iterations() * 9);
}
BENCHMARK(BM_TrackerStep)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
