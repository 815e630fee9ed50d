#include "ccd/operators.hpp"
#include "ccd/proximal.hpp"
#include "ccd/stacked_operator.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace ccd {
namespace {

Vector random_input(Index n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  Vector v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

void BM_Grad2dApply(benchmark::State& state) {
  const Index n = state.range(0);
  const auto op = grad2d_aniso(n, n);
  const Vector u = random_input(n * n);
  for (auto _ : state) benchmark::DoNotOptimize(op.apply(u));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_Grad2dApply)->Arg(64)->Arg(256)->Arg(512);

void BM_Grad2dAdjoint(benchmark::State& state) {
  const Index n = state.range(0);
  const auto op = grad2d_aniso(n, n);
  const Vector z = random_input(op.n_out());
  for (auto _ : state) benchmark::DoNotOptimize(op.apply_adjoint(z));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_Grad2dAdjoint)->Arg(64)->Arg(256)->Arg(512);

void BM_Dilat1dApply(benchmark::State& state) {
  const Index n = state.range(0);
  const auto op = dilat1d_kernel(n, n, {0.1, 2.0, 1e-2});
  const Vector u = random_input(n);
  for (auto _ : state) benchmark::DoNotOptimize(op.apply(u));
}
BENCHMARK(BM_Dilat1dApply)->Arg(500)->Arg(2000);

void BM_Reservoir2dApply(benchmark::State& state) {
  const Index n = state.range(0);
  const auto op = reservoir2d_kernel(n, {0.455, 1.2, 5.8515e3});
  const Vector u = random_input(n * n);
  for (auto _ : state) benchmark::DoNotOptimize(op.apply(u));
}
BENCHMARK(BM_Reservoir2dApply)->Arg(30)->Arg(50);

void BM_StackedApplyAdjoint(benchmark::State& state) {
  const Index n = state.range(0);
  const auto f = stack(identity_operator(n * n), grad2d_aniso(n, n), 10.0, 1.0);
  const Vector u = random_input(n * n);
  for (auto _ : state) benchmark::DoNotOptimize(f.apply_adjoint(f.apply(u)));
}
BENCHMARK(BM_StackedApplyAdjoint)->Arg(64)->Arg(256);

void BM_Shrink(benchmark::State& state) {
  const Vector y = random_input(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(shrink(y, 0.5));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Shrink)->Arg(1 << 12)->Arg(1 << 18);

}  // namespace
}  // namespace ccd
