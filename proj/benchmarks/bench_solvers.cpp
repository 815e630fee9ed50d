#include "ccd/harness.hpp"
#include "ccd/operators.hpp"
#include "ccd/solvers.hpp"

#include <benchmark/benchmark.h>

namespace ccd {
namespace {

// 100 combined A/A^T applications on the blocky denoising problem.
AdmmProblem denoise_problem(Index n) {
  const Vector truth = blocky_truth(n);
  const Vector d = truth + make_noise({n, n}, {0.15, 0.25, 1}, truth);
  return {identity_operator(n * n), grad2d_aniso(n, n), d, 10.0, 1.0};
}

AdmmProblem spikes_problem() {
  const Index n = 500;
  const auto a = dilat1d_kernel(n, n, {0.1, 2.0, 1e-2});
  const Vector clean = a.apply(spikes_truth(n));
  const Vector d = clean + make_noise({n, 1}, {0.15, 0.2, 1}, clean);
  return {a, identity_operator(n), d, 1e4, 0.05};
}

SolverOptions budget_options() {
  SolverOptions o;
  o.budget = 100;
  return o;
}

void BM_DenoiseLmccd(benchmark::State& state) {
  const AdmmProblem p = denoise_problem(state.range(0));
  const auto m = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(lmccd_solve(p, m, budget_options()));
}
BENCHMARK(BM_DenoiseLmccd)->Args({64, 50})->Args({128, 50})->Args({128, 10})->Unit(benchmark::kMillisecond);

void BM_DenoiseCcd(benchmark::State& state) {
  const AdmmProblem p = denoise_problem(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ccd_solve(p, budget_options()));
}
BENCHMARK(BM_DenoiseCcd)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_DenoiseRcg(benchmark::State& state) {
  const AdmmProblem p = denoise_problem(state.range(0));
  const auto n_cg = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(rcg_solve(p, n_cg, budget_options()));
}
BENCHMARK(BM_DenoiseRcg)->Args({64, 1})->Args({128, 1})->Args({128, 5})->Unit(benchmark::kMillisecond);

void BM_SpikesLmccd(benchmark::State& state) {
  const AdmmProblem p = spikes_problem();
  for (auto _ : state) benchmark::DoNotOptimize(lmccd_solve(p, 100, budget_options()));
}
BENCHMARK(BM_SpikesLmccd)->Unit(benchmark::kMillisecond);

void BM_SpikesFista(benchmark::State& state) {
  const AdmmProblem p = spikes_problem();
  const double step = default_prox_step(p.a_op, p.alpha);
  for (auto _ : state) benchmark::DoNotOptimize(fista_solve(p.a_op, p.d, p.alpha, step, budget_options()));
}
BENCHMARK(BM_SpikesFista)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace ccd
