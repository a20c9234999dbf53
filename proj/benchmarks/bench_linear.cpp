#include <benchmark/benchmark.h>

#include "sdm/dataset/synth.hpp"
#include "sdm/linear/gwr.hpp"
#include "sdm/linear/ols.hpp"
#include "sdm/selection/lasso.hpp"

using namespace sdm;

namespace {

data::FeatureTable table(std::size_t n) {
  auto cfg = data::synth_preset("two-cluster");
  cfg.n = n;
  return data::synth_generate(cfg, 3).table;
}

void BM_OlsFit(benchmark::State& state) {
  const auto t = table(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(linear::ols_fit(t));
}
BENCHMARK(BM_OlsFit)->Arg(500)->Arg(2'000);

void BM_GwrFitAdaptive(benchmark::State& state) {
  const auto t = table(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(linear::gwr_fit(t, spatial::Kernel::bisquare, spatial::Bandwidth::adaptive(60)));
  }
}
BENCHMARK(BM_GwrFitAdaptive)->Arg(250)->Arg(500)->Arg(1'000)->Unit(benchmark::kMillisecond);

void BM_LassoPath(benchmark::State& state) {
  const auto t = table(1'000);
  const double lmax = selection::lambda_max(t.X, t.y);
  const auto grid = selection::lambda_grid(lmax, 100);
  for (auto _ : state) benchmark::DoNotOptimize(selection::lasso_path(t.X, t.y, grid));
}
BENCHMARK(BM_LassoPath)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
