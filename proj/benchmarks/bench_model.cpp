#include <benchmark/benchmark.h>

#include <random>

#include "xorland/model.hpp"

using namespace xorland;

namespace {

WeightVector random_weights(int nh) {
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const Layout layout(nh);
  Vector v(layout.dim());
  for (int a = 0; a < layout.dim(); ++a) v[a] = u(gen);
  return WeightVector(layout, v);
}

const LossConfig kConfig{1e-4, true};

void BM_Loss(benchmark::State& state) {
  const WeightVector w = random_weights(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(loss(w, kConfig));
}

void BM_Gradient(benchmark::State& state) {
  const WeightVector w = random_weights(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gradient(w, kConfig));
}

void BM_Hessian(benchmark::State& state) {
  const WeightVector w = random_weights(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(hessian(w, kConfig));
}

void BM_Spectrum(benchmark::State& state) {
  const WeightVector w = random_weights(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(spectrum(w, kConfig));
}

}  // namespace

BENCHMARK(BM_Loss)->DenseRange(1, 6);
BENCHMARK(BM_Gradient)->DenseRange(1, 6);
BENCHMARK(BM_Hessian)->DenseRange(1, 6);
BENCHMARK(BM_Spectrum)->DenseRange(1, 6);
