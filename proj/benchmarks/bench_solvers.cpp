#include <benchmark/benchmark.h>

#include <random>

#include "gnefair/equilibria.hpp"
#include "gnefair/evgame.hpp"
#include "gnefair/fairness.hpp"
#include "gnefair/vi.hpp"

using namespace gnefair;

namespace {

std::pair<Matrix, Vector> monotone_operator(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix S(n, n), K(n, n);
  Vector m(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i) = g(rng);
    for (Eigen::Index j = 0; j < n; ++j) {
      S(i, j) = g(rng);
      K(i, j) = g(rng);
    }
  }
  Matrix M = S * S.transpose() / static_cast<double>(n) + 0.5 * Matrix::Identity(n, n) +
             0.5 * (K - K.transpose());
  return {M, m};
}

void BM_Projection(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const FeasibleSet set = FeasibleSet::capped_orthant(n, 1.0);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 1.0);
  Vector p(n);
  for (Eigen::Index i = 0; i < n; ++i) p(i) = g(rng);
  for (auto _ : state) benchmark::DoNotOptimize(vi::project_feasible(p, set));
}
BENCHMARK(BM_Projection)->RangeMultiplier(4)->Range(2, 2048);

void BM_Extragradient(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const auto [M, m] = monotone_operator(n, 2);
  const FeasibleSet set = FeasibleSet::capped_orthant(n, 1.0);
  const vi::Operator F = [&](const Vector& x) { return Vector(M * x + m); };
  for (auto _ : state) benchmark::DoNotOptimize(vi::solve_vi(F, set));
}
BENCHMARK(BM_Extragradient)->DenseRange(2, 10, 4)->Arg(50);

void BM_ActiveSet(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const auto [M, m] = monotone_operator(n, 3);
  const FeasibleSet set = FeasibleSet::capped_orthant(n, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(vi::solve_affine_vi_active_set(M, m, set));
}
BENCHMARK(BM_ActiveSet)->DenseRange(2, 12, 2);

void BM_VgneTransformedCost(benchmark::State& state) {
  const GameModel g = ev::scenario(ev::Scenario::transformed_cost);
  for (auto _ : state) benchmark::DoNotOptimize(solve_vgne(g));
}
BENCHMARK(BM_VgneTransformedCost);

void BM_FgneMaximin(benchmark::State& state) {
  const GameModel g = ev::scenario(state.range(0) == 2 ? ev::Scenario::two_agent
                                                       : ev::Scenario::baseline);
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_fgne(g, FairnessMetric::maximin(),
                                        default_grid_density(g.num_agents()), 100, {}, 1));
}
BENCHMARK(BM_FgneMaximin)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
