#include <benchmark/benchmark.h>

#include <ernmf/evalbench.hpp>
#include <ernmf/mvee.hpp>
#include <ernmf/svd.hpp>

using namespace ernmf;

namespace {

// Reduced separable data: the realistic input shape for the ellipsoid stage.
Eigen::MatrixXd reduced_points(Index d, Index m, Index r, double noise,
                               std::uint64_t seed) {
  const SyntheticInstance inst = gen_synthetic(d, m, r, noise, seed);
  return reduce(inst.M, r).P;
}

void BM_mvee_full(benchmark::State& state) {
  const Index m = state.range(0);
  const Eigen::MatrixXd P = reduced_points(30, m, 10, 0.02, 42);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_q_full(P));
  }
  state.SetComplexityN(static_cast<benchmark::IterationCount>(m));
}
BENCHMARK(BM_mvee_full)->Arg(200)->Arg(500)->Arg(1000)->Arg(2000)
    ->Unit(benchmark::kMillisecond)->Complexity();

void BM_mvee_cutting_plane(benchmark::State& state) {
  const Index m = state.range(0);
  const Eigen::MatrixXd P = reduced_points(30, m, 10, 0.02, 42);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_q_cutting_plane(P));
  }
  state.SetComplexityN(static_cast<benchmark::IterationCount>(m));
}
BENCHMARK(BM_mvee_cutting_plane)->Arg(200)->Arg(500)->Arg(1000)->Arg(2000)
    ->Arg(5000)->Unit(benchmark::kMillisecond)->Complexity();

void BM_mvee_rank(benchmark::State& state) {
  const Index r = state.range(0);
  const Eigen::MatrixXd P = reduced_points(2 * r, 1000, r, 0.02, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_q_cutting_plane(P));
  }
}
BENCHMARK(BM_mvee_rank)->Arg(5)->Arg(10)->Arg(20)
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
