#include <benchmark/benchmark.h>

#include <random>

#include "sdm/spatial/spatial_index.hpp"
#include "sdm/spatial/weights.hpp"

namespace {

std::vector<sdm::spatial::Point> scatter(std::size_t n) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 20'000.0);
  std::vector<sdm::spatial::Point> p(n);
  for (auto& q : p) q = {u(rng), u(rng)};
  return p;
}

void BM_IndexBuild(benchmark::State& state) {
  const auto pts = scatter(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sdm::spatial::SpatialIndex(pts));
}
BENCHMARK(BM_IndexBuild)->Arg(1'000)->Arg(10'000)->Arg(100'000);

void BM_Knn(benchmark::State& state) {
  const sdm::spatial::SpatialIndex index(scatter(100'000));
  const auto queries = scatter(1'024);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(index.knn(queries[i++ & 1023], static_cast<std::size_t>(state.range(0))));
  }
}
BENCHMARK(BM_Knn)->Arg(1)->Arg(8)->Arg(100);

void BM_Within3km(benchmark::State& state) {
  const sdm::spatial::SpatialIndex index(scatter(100'000));
  const auto queries = scatter(1'024);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(index.within(queries[i++ & 1023], 3'000.0));
}
BENCHMARK(BM_Within3km);

void BM_KnnWeights(benchmark::State& state) {
  const sdm::spatial::SpatialIndex index(scatter(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(sdm::spatial::knn_weights(index, 8, true));
}
BENCHMARK(BM_KnnWeights)->Arg(1'000)->Arg(10'000);

}  // namespace

BENCHMARK_MAIN();
