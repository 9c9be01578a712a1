#include <benchmark/benchmark.h>

#include <random>

#include "xorland/explore.hpp"
#include "xorland/graphs.hpp"
#include "xorland/optimize.hpp"

using namespace xorland;

namespace {

void BM_MinimizeFromRandom(benchmark::State& state) {
  const Layout layout(static_cast<int>(state.range(0)));
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (auto _ : state) {
    Vector v(layout.dim());
    for (int a = 0; a < layout.dim(); ++a) v[a] = u(gen);
    benchmark::DoNotOptimize(minimize(WeightVector(layout, v), {1e-4, true}));
  }
}

// One short chain: perturbation, minimization and certification per step.
void BM_BasinHop(benchmark::State& state) {
  BasinHoppingSettings s;
  s.steps = 50;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    s.seed = seed++;
    benchmark::DoNotOptimize(basin_hop({1e-4, true}, Layout(static_cast<int>(state.range(0))), s));
  }
}

void BM_BuildTree(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<TreeMinimum> minima;
  for (int k = 0; k < n; ++k) minima.push_back({k, u(gen)});
  std::vector<TreeConnection> links;
  for (int k = 1; k < n; ++k) {
    for (int r = 0; r < 2; ++r) {
      const int other = static_cast<int>(gen() % k);
      links.push_back({std::max(minima[k].loss, minima[other].loss) + u(gen), k, other});
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(build_tree(minima, links, 0.01, 2.0));
}

}  // namespace

BENCHMARK(BM_MinimizeFromRandom)->Arg(2)->Arg(6);
BENCHMARK(BM_BasinHop)->Arg(2)->Arg(6)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildTree)->Arg(25)->Arg(200);
