#include <benchmark/benchmark.h>

#include "kldproj/projections.hpp"
#include "kldproj/refine.hpp"
#include "kldproj/synth.hpp"

using namespace kldproj;

namespace {

std::vector<GaussianParams> pair_of(Index d) {
  return random_classes({d, 0.1, 10.0, 1.0, false, 42}, 2);
}

void BM_Kld(benchmark::State& state) {
  const auto c = pair_of(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kld(c[0], c[1]));
}
BENCHMARK(BM_Kld)->Arg(10)->Arg(100)->Arg(300);

void BM_Algorithm1(benchmark::State& state) {
  const auto c = pair_of(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(algorithm1(c[0], c[1], 5).achieved_kld);
}
BENCHMARK(BM_Algorithm1)->Arg(10)->Arg(100);

void BM_Algorithm2(benchmark::State& state) {
  const auto c = pair_of(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(algorithm2(c[0], c[1], 5).achieved_kld);
}
BENCHMARK(BM_Algorithm2)->Arg(10)->Arg(100);

void BM_Gradient(benchmark::State& state) {
  const auto c = pair_of(state.range(0));
  const Matrix a = algorithm2(c[0], c[1], 5).original_matrix;
  for (auto _ : state) benchmark::DoNotOptimize(kld_gradient(a, c[0], c[1]).sum());
}
BENCHMARK(BM_Gradient)->Arg(10)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
