#include <benchmark/benchmark.h>

#include "siclab/gramian.hpp"
#include "siclab/model.hpp"
#include "siclab/security.hpp"
#include "siclab/sysid.hpp"

namespace {

using namespace siclab;

void BM_SolveDlyap(benchmark::State& state) {
  const Index n = state.range(0);
  const LinearSystem sys = random_stable_plant(n, 2, 0.95, 1);
  const Matrix q = sys.b() * sys.b().transpose();
  for (auto _ : state) benchmark::DoNotOptimize(solve_dlyap(sys.a(), q));
}
BENCHMARK(BM_SolveDlyap)->Arg(4)->Arg(16)->Arg(64);

void BM_SimulateAttack(benchmark::State& state) {
  const LinearSystem sys = reference_plant();
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_attack(sys, NoiseConfig(1, 1), state.range(0), seed++));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateAttack)->Arg(200)->Arg(2000)->Arg(20000);

void BM_LeastSquaresIdentify(benchmark::State& state) {
  const LinearSystem sys = reference_plant();
  const TrajectoryData data = simulate_attack(sys, NoiseConfig(1, 1), state.range(0), 3);
  for (auto _ : state) benchmark::DoNotOptimize(least_squares_identify(data, sys));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LeastSquaresIdentify)->Arg(200)->Arg(2000)->Arg(20000);

void BM_MinSampleSize(benchmark::State& state) {
  const ComplexityModel model(reference_plant(), NoiseConfig(1, 1));
  for (auto _ : state) benchmark::DoNotOptimize(min_sample_size(model, 1e-6));
}
BENCHMARK(BM_MinSampleSize);

}  // namespace

BENCHMARK_MAIN();
