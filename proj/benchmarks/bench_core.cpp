#include <benchmark/benchmark.h>

#include "spsolve/solvers.hpp"

#include <random>

using namespace spsolve;

namespace {

std::shared_ptr<const RadialGrid> grid_of(std::int64_t n) {
  return std::make_shared<const RadialGrid>(make_grid(3, 10.0, std::size_t(n)));
}

void BM_SolvePhi(benchmark::State& state) {
  auto grid = grid_of(state.range(0));
  std::mt19937 rng(1);
  Field u = random_smooth_field(grid, rng);
  const auto rho = WeightModel::make_homogeneous(2.0);
  for (auto _ : state) {
    Field phi = solve_phi(*grid, rho, u);
    benchmark::DoNotOptimize(phi.v.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolvePhi)->RangeMultiplier(4)->Range(512, 32768)->Complexity();

void BM_Energy(benchmark::State& state) {
  auto grid = grid_of(state.range(0));
  std::mt19937 rng(2);
  Field u = random_smooth_field(grid, rng);
  Params p;
  p.q = 4.0;
  p.lambda = 1.0;
  const auto rho = WeightModel::make_homogeneous(2.0);
  for (auto _ : state) {
    const auto e = energy(u, p, rho);
    benchmark::DoNotOptimize(e.total);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Energy)->RangeMultiplier(4)->Range(512, 32768)->Complexity();

void BM_GradientField(benchmark::State& state) {
  auto grid = grid_of(state.range(0));
  std::mt19937 rng(3);
  Field u = random_smooth_field(grid, rng);
  Params p;
  p.q = 4.0;
  p.lambda = 1.0;
  const auto rho = WeightModel::make_homogeneous(2.0);
  for (auto _ : state) {
    Field g = gradient_field(u, p, rho);
    benchmark::DoNotOptimize(g.v.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GradientField)->RangeMultiplier(4)->Range(512, 32768)->Complexity();

void BM_Groundstate(benchmark::State& state) {
  auto grid = grid_of(state.range(0));
  Params p;
  p.q = 4.0;
  p.lambda = 1.0;
  const auto rho = WeightModel::make_homogeneous(2.0);
  for (auto _ : state) {
    auto rep = solve_groundstate(p, rho, grid, gaussian_field(grid, 1.0, 1.0));
    benchmark::DoNotOptimize(rep.level);
  }
}
BENCHMARK(BM_Groundstate)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_NonexistenceFlow(benchmark::State& state) {
  auto grid = grid_of(state.range(0));
  Params p;
  p.q = 2.0;
  p.lambda = 1.0;
  const auto rho = WeightModel::make_coercive(1.0, 2.0, 1.0);
  std::mt19937 rng(4);
  Field init = random_smooth_field(grid, rng);
  for (auto _ : state) {
    auto rep = nonexistence_flow(p, rho, grid, init);
    benchmark::DoNotOptimize(rep.final_h1);
  }
}
BENCHMARK(BM_NonexistenceFlow)->Arg(512)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
