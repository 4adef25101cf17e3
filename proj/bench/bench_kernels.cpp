// Serial reference vs OpenMP variant for the data-parallel kernels and the
// two embarrassingly parallel drivers (perturbation sweep, predictability
// sweep). Run with OMP_NUM_THREADS set to the core count of interest.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "edgeimp/generators.hpp"
#include "edgeimp/kernels.hpp"
#include "edgeimp/prediction.hpp"

using namespace edgeimp;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::serial : Exec::parallel; }

std::vector<double> normal_draws(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  std::vector<double> v(n);
  for (auto& x : v) x = z(rng);
  return v;
}

void BM_Spmv(benchmark::State& state) {
  const auto g = generate({ErdosRenyi{static_cast<std::size_t>(state.range(1)), 10.0 / state.range(1)},
                           UniformIntWeights{1, 10}, 1})
                     .graph;
  const auto a = adjacency_matrix(g);
  std::vector<double> x(a.cols, 1.0), y(a.rows);
  for (auto _ : state) {
    kernels::spmv(a, x, y, exec_of(state));
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_Spmv)->ArgsProduct({{0, 1}, {1000, 20000}});

void BM_Kde(benchmark::State& state) {
  const auto samples = normal_draws(static_cast<std::size_t>(state.range(1)), 2);
  std::vector<double> grid(512), out(512);
  for (std::size_t g = 0; g < grid.size(); ++g) grid[g] = -4.0 + 8.0 * g / (grid.size() - 1);
  for (auto _ : state) {
    kernels::gaussian_kde(samples, 0.2, grid, out, exec_of(state));
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_Kde)->ArgsProduct({{0, 1}, {10000, 100000}});

void BM_BernoulliLoglik(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(1));
  auto log_l = normal_draws(n, 3);
  std::vector<std::uint8_t> changed(n);
  for (std::size_t i = 0; i < n; ++i) {
    log_l[i] = -3.0 + 0.5 * log_l[i];
    changed[i] = i % 3 == 0;
  }
  for (auto _ : state) benchmark::DoNotOptimize(kernels::bernoulli_loglik(log_l, changed, 0.5, 0.3, exec_of(state)));
}
BENCHMARK(BM_BernoulliLoglik)->ArgsProduct({{0, 1}, {100000, 1000000}});

void BM_GaussianLoglik(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(1));
  const auto log_l = normal_draws(n, 4);
  const auto x = normal_draws(n, 5);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::gaussian_loglik(log_l, x, 0.01, 0.5, exec_of(state)));
}
BENCHMARK(BM_GaussianLoglik)->ArgsProduct({{0, 1}, {100000, 1000000}});

void BM_PerturbationSweep(benchmark::State& state) {
  const auto g = generate({ErdosRenyi{60, 0.1}, UniformIntWeights{1, 10}, 6}).graph;
  PerturbationOptions po;
  po.grid = symmetric_grid(0.05, 11);
  po.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(run_perturbation(g, po).results.size());
}
BENCHMARK(BM_PerturbationSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_PredictabilitySweep(benchmark::State& state) {
  SweepOptions so;
  so.base = {ErdosRenyi{30, 0.2}, UniformIntWeights{1, 10}, 0};
  so.alphas = {0.5};
  so.rhos = {0.0, 1.0};
  so.beta = 0.01;
  so.steps = 30;
  so.seeds = {0, 1, 2, 3};
  so.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(predictability_sweep(so).size());
}
BENCHMARK(BM_PredictabilitySweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
