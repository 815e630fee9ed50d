// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "support.hpp"

#include "ccd/experiment.hpp"
#include "ccd/harness.hpp"
#include "ccd/krylov.hpp"
#include "ccd/op_counter.hpp"
#include "ccd/operators.hpp"
#include "ccd/proximal.hpp"
#include "ccd/solvers.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace ccd {
namespace {

using test::random_matrix;
using test::random_vector;
using test::rel_diff;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

AdmmProblem oracle_instance() {
  std::mt19937_64 rng(42);
  const Matrix a = random_matrix(40, 30, rng);
  const Vector d = random_vector(40, rng);
  return {dense_operator(a), diff1d(30), d, 1.0, 1.0};
}

SolverResult oracle(const AdmmProblem& p) {
  SolverOptions o;
  o.max_iters = 100000;
  o.tol = 1e-12;
  return admm_exact(p, o);
}

std::vector<SolverState> trajectory(const std::function<SolverResult(const SolverOptions&)>& run, int iters) {
  std::vector<SolverState> states;
  SolverOptions o;
  o.max_iters = iters;
  o.on_iterate = [&](const SolverState& s) { states.push_back(s); };
  run(o);
  return states;
}

Outcome oracle_equivalence() {
  const AdmmProblem p = oracle_instance();
  const auto t0 = std::chrono::steady_clock::now();
  const SolverResult star = oracle(p);
  SolverOptions o;
  o.max_iters = 500;
  const double err = rel_diff(ccd_solve(p, o).state.u, star.state.u);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {err <= 1e-6 && secs < 10.0, fmt("rel error %.3e after 500 iterations, %.2f s", err, secs)};
}

Outcome lyapunov_descent() {
  const AdmmProblem p = oracle_instance();
  const SolverResult star = oracle(p);
  const auto states = trajectory([&](const SolverOptions& o) { return admm_exact(p, o); }, 200);
  auto v = [&](const Vector& z, const Vector& b) {
    return (z - star.state.z).squaredNorm() + (b - star.state.b).squaredNorm();
  };
  const double v0 = v(Vector::Zero(29), Vector::Zero(29));
  double previous = v0;
  double worst_rise = 0.0;
  for (const auto& s : states) {
    const double cur = v(s.z, s.b);
    worst_rise = std::max(worst_rise, cur - previous);
    previous = cur;
  }
  return {states.size() == 200 && worst_rise <= 1e-10 * v0,
          fmt("largest rise %.3e (slack %.3e) over %zu iterations", worst_rise, 1e-10 * v0, states.size())};
}

Outcome conjugacy() {
  std::mt19937_64 rng(14);
  const auto f = stack(dense_operator(random_matrix(21, 40, rng)), diff1d(40), 1.0, 1.0);
  std::vector<Vector> rhs;
  const Vector base = random_vector(60, rng);
  for (int k = 0; k <= 41; ++k) rhs.push_back(base + 0.2 * random_vector(60, rng));
  double worst_conj = 0.0;
  double worst_orth = 0.0;
  ScdOptions o;
  o.max_iters = 40;
  o.on_iteration = [&](int k, const Vector& u_next, const DirectionSet& store) {
    const Vector r = rhs[static_cast<std::size_t>(k)] - f.apply(u_next);
    for (std::size_t i = 0; i < store.size(); ++i) {
      const double qi = store.q(i).norm();
      if (qi == 0.0) continue;
      if (i <= static_cast<std::size_t>(k)) {
        worst_orth = std::max(worst_orth, std::abs(store.q(i).dot(r)) / (qi * r.norm()));
      }
      for (std::size_t j = 0; j < i; ++j) {
        const double qj = store.q(j).norm();
        if (qj > 0.0) worst_conj = std::max(worst_conj, std::abs(store.q(i).dot(store.q(j))) / (qi * qj));
      }
    }
  };
  scd_solve(f, [&](int k, const Vector&) { return rhs[static_cast<std::size_t>(k)]; }, o);
  return {worst_conj <= 1e-8 && worst_orth <= 1e-8,
          fmt("max |q_i.q_j| %.3e, max |q_i.r| %.3e", worst_conj, worst_orth)};
}

Outcome limited_memory_consistency() {
  const AdmmProblem p = oracle_instance();
  const auto ccd = trajectory([&](const SolverOptions& o) { return ccd_solve(p, o); }, 500);
  const auto lm = trajectory([&](const SolverOptions& o) { return lmccd_solve(p, 500, o); }, 500);
  double worst = ccd.size() == lm.size() ? 0.0 : std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < std::min(ccd.size(), lm.size()); ++k) worst = std::max(worst, rel_diff(lm[k].u, ccd[k].u));
  return {worst <= 1e-12, fmt("worst per-iteration difference %.3e over %zu iterations", worst, ccd.size())};
}

SolverSpec spec(SolverKind kind, std::optional<int> m = std::nullopt, std::optional<int> ncg = std::nullopt) {
  return {kind, m, ncg, std::nullopt};
}

double final_error(const SolverResult& r) { return r.record.back().rel_error; }

Outcome denoising_parity() {
  ExperimentConfig c = find_preset("denoise")->config;
  c.grid = {64, 64};
  c.alpha = 10.0;
  c.lambda = 1.0;
  c.budget = 100;
  const ProblemInstance p = build_problem(c);
  const double lm = final_error(run_solver(p, c, spec(SolverKind::kLmccd, 50)));
  const double rcg = final_error(run_solver(p, c, spec(SolverKind::kRcg, std::nullopt, 1)));
  return {std::abs(lm - rcg) <= 0.05 * rcg, fmt("lmccd_m50 %.5f, rcg_ncg1 %.5f", lm, rcg)};
}

Outcome spike_ordering() {
  ExperimentConfig c = find_preset("spikes")->config;
  const ProblemInstance p = build_problem(c);
  const SolverResult lm = run_solver(p, c, spec(SolverKind::kLmccd, 100));
  const double lm_err = final_error(lm);
  double best_other = std::numeric_limits<double>::infinity();
  std::string others;
  for (int nc : {1, 5, 10}) {
    const double e = final_error(run_solver(p, c, spec(SolverKind::kRcg, std::nullopt, nc)));
    best_other = std::min(best_other, e);
    others += fmt(" rcg_ncg%d %.4f", nc, e);
  }
  const double fista = final_error(run_solver(p, c, spec(SolverKind::kFista)));
  best_other = std::min(best_other, fista);
  others += fmt(" fista %.4f", fista);

  const Vector& u = lm.state.u;
  const double cutoff = 0.1 * u.cwiseAbs().maxCoeff();
  int found = 0;
  const Index n = u.size();
  for (double pos : kSpikePositions) found += std::abs(u[std::llround(pos * static_cast<double>(n))]) > cutoff;
  return {lm_err < best_other && found == 5,
          fmt("lmccd_m100 %.4f;", lm_err) + others + fmt("; %d/5 spikes in support", found)};
}

Outcome condition_trend() {
  ExperimentConfig c = find_preset("denoise")->config;
  c.grid = {64, 64};
  const ProblemInstance p = build_problem(c);
  std::string detail;
  bool monotone = true;
  double previous = 0.0;
  double at_one = 0.0;
  for (double lambda : {1.0, 1e2, 1e3, 1e4}) {
    const double k = estimate_condition(stack(p.a, p.b, 10.0, lambda), 200).normal();
    monotone &= k >= previous;
    if (lambda == 1.0) at_one = k;
    previous = k;
    detail += fmt(" %g:%.4g", lambda, k);
  }
  return {monotone && std::abs(at_one - 1.8) <= 0.15 * 1.8, "kappa by lambda" + detail};
}

Outcome adjoint_and_prox() {
  std::mt19937_64 rng(5);
  const std::vector<std::pair<std::string, LinearOperator>> ops = {
      {"dense", dense_operator(random_matrix(7, 5, rng))},
      {"identity", identity_operator(9)},
      {"diff1d", diff1d(17)},
      {"grad2d", grad2d_aniso(6, 5)},
      {"dilat1d", dilat1d_kernel(500, 500, {0.1, 2.0, 1e-2})},
      {"reservoir2d", reservoir2d_kernel(20, {0.455, 1.2, 5.8515e3})},
      {"stacked", stack(dense_operator(random_matrix(8, 12, rng)), grad2d_aniso(4, 3), 2.5, 0.7).as_operator()},
      {"counted", count_data_operator(diff1d(6), std::make_shared<OpCounter>())},
  };
  double worst_adjoint = 0.0;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    worst_adjoint = std::max(worst_adjoint, test::worst_adjoint_defect(ops[i].second, 100, 100 + i));
  }

  constexpr double kStep = 1e-4;
  std::uniform_real_distribution<double> scalar(-25.0, 25.0);
  int cases = 0;
  double worst_shrink = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double y = scalar(rng);
    for (double gamma : {0.1, 1.0, 10.0}) {
      const double lo = std::min(0.0, y) - 10 * kStep;
      const double hi = std::max(0.0, y) + 10 * kStep;
      double best_x = lo;
      double best = std::numeric_limits<double>::infinity();
      for (double x = lo; x <= hi; x += kStep) {
        const double value = gamma * std::abs(x) + 0.5 * (y - x) * (y - x);
        if (value < best) {
          best = value;
          best_x = x;
        }
      }
      worst_shrink = std::max(worst_shrink, std::abs(shrink(y, gamma) - best_x));
      ++cases;
    }
  }
  return {worst_adjoint <= 1e-10 && worst_shrink <= kStep,
          fmt("adjoint defect %.3e over %zu operators; shrink gap %.3e over %d cases", worst_adjoint, ops.size(),
              worst_shrink, cases)};
}

Outcome cgne_vs_direct() {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> size(2, 20);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Index n = size(rng);
    const Index m = n + size(rng);
    const auto f = stack(dense_operator(random_matrix(m, n, rng)), diff1d(n), 1.0, 0.5);
    const Vector v = random_vector(f.n_out(), rng);
    worst = std::max(worst, rel_diff(cgne_solve(f, v, Vector::Zero(n), static_cast<int>(n)), direct_ls_solve(f, v)));
  }
  return {worst <= 1e-8, fmt("worst relative difference %.3e over 50 instances", worst)};
}

Outcome constrained_solve() {
  std::mt19937_64 rng(16);
  const Matrix am = random_matrix(9, 6, rng);
  const Matrix bm = random_matrix(1, 6, rng);
  const Vector d = random_vector(9, rng);
  const Vector c{{0.75}};
  Matrix kkt = Matrix::Zero(7, 7);
  kkt.topLeftCorner(6, 6) = am.transpose() * am;
  kkt.topRightCorner(6, 1) = bm.transpose();
  kkt.bottomLeftCorner(1, 6) = bm;
  Vector rhs(7);
  rhs << am.transpose() * d, c;
  const Vector expected = kkt.fullPivLu().solve(rhs).head(6);
  SolverOptions o;
  o.max_iters = 1000;
  const SolverResult r = scd_mm_solve(dense_operator(am), dense_operator(bm), d, c, 1.0, o);
  const double err = rel_diff(r.state.u, expected);
  const double violation = (bm * r.state.u - c).norm();
  return {err <= 1e-6 && violation <= 1e-8, fmt("KKT error %.3e, ||Bu - c|| %.3e", err, violation)};
}

Outcome cost_accounting() {
  std::mt19937_64 rng(20);
  const AdmmProblem p{dense_operator(random_matrix(18, 10, rng)), diff1d(10), random_vector(18, rng), 1.0, 1.0};
  SolverOptions o;
  o.max_iters = 20;
  std::string bad;
  auto check = [&](const SolverResult& r, std::int64_t a, std::int64_t at, const std::string& name) {
    if (r.state.iteration != 20 || r.ops.a != a || r.ops.at != at || r.record.back().ops_a != a ||
        r.record.back().ops_at != at) {
      bad += fmt(" %s(A=%lld,At=%lld)", name.c_str(), static_cast<long long>(r.ops.a), static_cast<long long>(r.ops.at));
    }
  };
  check(ccd_solve(p, o), 21, 21, "ccd");
  check(lmccd_solve(p, 4, o), 21, 21, "lmccd");
  for (int nc : {1, 5, 10}) check(rcg_solve(p, nc, o), 20 * (nc + 1), 20 * nc, "rcg" + std::to_string(nc));
  check(admm_exact(p, o), 10, 0, "admm-exact");
  check(ista_solve(p.a_op, p.d, 1.0, std::nullopt, o), 20, 20, "ista");
  check(fista_solve(p.a_op, p.d, 1.0, std::nullopt, o), 20, 20, "fista");
  check(scd_mm_solve(p.a_op, p.b_op, p.d, Vector::Zero(9), 1.0, o), 21, 21, "scd-mm");
  return {bad.empty(), bad.empty() ? "all solvers match the cost model" : "mismatch:" + bad};
}

}  // namespace
}  // namespace ccd

int main() {
  using namespace ccd;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"oracle equivalence", oracle_equivalence},
      {"lyapunov descent", lyapunov_descent},
      {"conjugacy and orthogonality", conjugacy},
      {"limited-memory consistency", limited_memory_consistency},
      {"denoising parity", denoising_parity},
      {"spike recovery ordering", spike_ordering},
      {"condition number trend", condition_trend},
      {"adjoint and shrink suites", adjoint_and_prox},
      {"cgne vs direct", cgne_vs_direct},
      {"constrained solve", constrained_solve},
      {"cost accounting", cost_accounting},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
