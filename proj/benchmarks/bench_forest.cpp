#include <benchmark/benchmark.h>

#include "sdm/dataset/synth.hpp"
#include "sdm/forest/forest.hpp"
#include "sdm/forest/shap.hpp"

using namespace sdm;

namespace {

const data::FeatureTable& table() {
  static const auto t = data::synth_generate(data::synth_preset("two-cluster"), 3).table;
  return t;
}

void BM_RfFit(benchmark::State& state) {
  forest::ForestParams p;
  p.n_trees = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(forest::rf_fit(table(), p, 1));
}
BENCHMARK(BM_RfFit)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_RfPredictRow(benchmark::State& state) {
  forest::ForestParams p;
  const auto m = forest::rf_fit(table(), p, 1);
  const Eigen::RowVectorXd x = table().X.row(0);
  for (auto _ : state) benchmark::DoNotOptimize(m.predict_row(x));
}
BENCHMARK(BM_RfPredictRow);

void BM_TreeShap(benchmark::State& state) {
  forest::ForestParams p;
  p.n_trees = 100;
  p.max_depth = static_cast<std::size_t>(state.range(0));
  const auto m = forest::rf_fit(table(), p, 1);
  const Eigen::RowVectorXd x = table().X.row(0);
  for (auto _ : state) benchmark::DoNotOptimize(forest::tree_shap(m, x));
}
BENCHMARK(BM_TreeShap)->Arg(4)->Arg(8)->Arg(0);

}  // namespace

BENCHMARK_MAIN();
