#include <benchmark/benchmark.h>

#include <random>

#include "shearlab/solver.hpp"
#include "shearlab/weights.hpp"

using namespace shearlab;

namespace {

GridSpec grid_of(int n_x, int n_y) {
  GridSpec g;
  g.n_x = n_x;
  g.n_y = n_y;
  g.l_y = 8.0 * kPi;
  return g;
}

SpectralField2D random_field(const GridSpec& grid, double amplitude, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  SpectralField2D f(grid);
  for (int k = 0; k <= 4; ++k) {
    for (int j = -16; j <= 16; ++j) {
      if (k == 0 && j <= 0) continue;
      f.set_real_mode(k, j, amplitude * Complex{normal(rng), normal(rng)});
    }
  }
  return f;
}

void BM_DealiasedProduct(benchmark::State& state) {
  const auto grid = grid_of(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const auto a = random_field(grid, 1.0, 1);
  const auto b = random_field(grid, 1.0, 2);
  for (auto _ : state) benchmark::DoNotOptimize(dealiased_product(a, b));
}
BENCHMARK(BM_DealiasedProduct)->Args({64, 256})->Args({128, 1024});

void BM_NonlinearTerms(benchmark::State& state) {
  const auto grid = grid_of(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const auto f = random_field(grid, 1e-3, 3);
  const auto g = random_field(grid, 1e-3, 4);
  for (auto _ : state) benchmark::DoNotOptimize(nonlinear_terms(f, g, 1.0));
}
BENCHMARK(BM_NonlinearTerms)->Args({64, 256})->Args({128, 1024});

void BM_Step(benchmark::State& state) {
  const auto grid = grid_of(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  SolverState s;
  s.f = random_field(grid, 1e-3, 5);
  s.g = random_field(grid, 1e-3, 6);
  s.params.mu = 1e-3;
  for (auto _ : state) benchmark::DoNotOptimize(step(s, 0.01));
}
BENCHMARK(BM_Step)->Args({64, 256})->Args({128, 1024});

void BM_DlogM(benchmark::State& state) {
  WeightParams p;
  p.trunc_J = static_cast<int>(state.range(0));
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dlog_m(t, 3, 12.5, 2, p));
    t += 1e-3;
  }
}
BENCHMARK(BM_DlogM)->Arg(8)->Arg(32);

void BM_LogWeightM(benchmark::State& state) {
  WeightParams p;
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_weight_m(t, 3, 12.5, 2, p));
    t += 1e-3;
  }
}
BENCHMARK(BM_LogWeightM);

}  // namespace

BENCHMARK_MAIN();
