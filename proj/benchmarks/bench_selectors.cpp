#include <benchmark/benchmark.h>

#include <ernmf/baselines.hpp>
#include <ernmf/er.hpp>
#include <ernmf/evalbench.hpp>

using namespace ernmf;

namespace {

void BM_spa(benchmark::State& state) {
  const Index m = state.range(0);
  const SyntheticInstance inst = gen_synthetic(50, m, 10, 0.05, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(spa(inst.M, 10));
  }
}
BENCHMARK(BM_spa)->Arg(500)->Arg(1000)->Arg(4000)
    ->Unit(benchmark::kMillisecond);

void BM_xray_greedy(benchmark::State& state) {
  const Index m = state.range(0);
  const SyntheticInstance inst = gen_synthetic(50, m, 10, 0.05, 3);
  SelectorConfig cfg;
  cfg.algorithm = SelectorAlgorithm::xray_greedy;
  for (auto _ : state) {
    benchmark::DoNotOptimize(xray(inst.M, 10, cfg));
  }
}
BENCHMARK(BM_xray_greedy)->Arg(500)->Arg(1000)->Arg(4000)
    ->Unit(benchmark::kMillisecond);

void BM_er_spa(benchmark::State& state) {
  const Index m = state.range(0);
  const SyntheticInstance inst = gen_synthetic(50, m, 10, 0.05, 3);
  SelectorConfig sel;
  for (auto _ : state) {
    benchmark::DoNotOptimize(er_practical(inst.M, 10, 10, sel));
  }
}
BENCHMARK(BM_er_spa)->Arg(500)->Arg(1000)->Arg(4000)
    ->Unit(benchmark::kMillisecond);

void BM_nnls(benchmark::State& state) {
  const Index m = state.range(0);
  const SyntheticInstance inst = gen_synthetic(50, m, 10, 0.05, 3);
  const Eigen::MatrixXd F = inst.M.gather_cols(inst.true_indices);
  for (auto _ : state) {
    benchmark::DoNotOptimize(weight_matrix(inst.M, inst.true_indices, 1e-10));
  }
  benchmark::DoNotOptimize(F);
}
BENCHMARK(BM_nnls)->Arg(500)->Arg(1000)->Arg(2000)
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
