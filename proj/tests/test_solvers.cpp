#include "support.hpp"

#include "ccd/harness.hpp"
#include "ccd/krylov.hpp"
#include "ccd/operators.hpp"
#include "ccd/proximal.hpp"
#include "ccd/solvers.hpp"

#include <gtest/gtest.h>

namespace ccd {
namespace {

using test::random_matrix;
using test::random_vector;
using test::rel_diff;

AdmmProblem random_problem(Index m, Index n, std::uint64_t seed, double alpha = 1.0, double lambda = 1.0) {
  std::mt19937_64 rng(seed);
  return {dense_operator(random_matrix(m, n, rng)), diff1d(n), random_vector(m, rng), alpha, lambda};
}

std::vector<SolverState> trajectory(const std::function<SolverResult(const SolverOptions&)>& run, int iters) {
  std::vector<SolverState> states;
  SolverOptions o;
  o.max_iters = iters;
  o.on_iterate = [&](const SolverState& s) { states.push_back(s); };
  run(o);
  return states;
}

SolverResult oracle(const AdmmProblem& p) {
  SolverOptions o;
  o.max_iters = 100000;
  o.tol = 1e-12;
  return admm_exact(p, o);
}

TEST(AdmmExact, ConsistentDataRecoveredInOneIteration) {
  std::mt19937_64 rng(1);
  const Index n = 8;
  const Vector u_star = Vector::Constant(n, 1.7);
  const auto a = dense_operator(random_matrix(12, n, rng));
  const AdmmProblem p{a, diff1d(n), a.apply(u_star), 2.0, 1.0};
  SolverOptions o;
  o.max_iters = 1;
  const SolverResult r = admm_exact(p, o);
  EXPECT_LE(rel_diff(r.state.u, u_star), 1e-10);
  EXPECT_LE(r.state.z.norm(), 1e-10);
}

TEST(AdmmExact, SeparableL1Problem) {
  const AdmmProblem p{identity_operator(3), identity_operator(3), Vector{{2.0, 0.1, -2.0}}, 1.0, 1.0};
  const SolverResult r = oracle(p);
  EXPECT_EQ(r.stop, StopReason::kConverged);
  EXPECT_LE((r.state.u - Vector{{1.0, 0.0, -1.0}}).norm(), 1e-9);
}

TEST(AdmmExact, LyapunovQuantityNonIncreasing) {
  const AdmmProblem p = random_problem(40, 30, 7);
  const SolverResult star = oracle(p);
  const auto states = trajectory([&](const SolverOptions& o) { return admm_exact(p, o); }, 200);
  auto lyapunov = [&](const Vector& z, const Vector& b) {
    return (z - star.state.z).squaredNorm() + (b - star.state.b).squaredNorm();
  };
  const double v0 = lyapunov(Vector::Zero(29), Vector::Zero(29));
  double previous = v0;
  for (const auto& s : states) {
    const double v = lyapunov(s.z, s.b);
    EXPECT_LE(v, previous + 1e-10 * v0) << "iteration " << s.iteration;
    previous = v;
  }
}

TEST(AdmmExact, RankDeficientSystemPropagates) {
  const AdmmProblem p{dense_operator(Matrix::Zero(3, 4)), identity_operator(4), Vector::Ones(3), 1.0, 0.0};
  EXPECT_THROW(admm_exact(p, SolverOptions{}), std::exception);
  Matrix a = Matrix::Zero(3, 4);
  a(0, 0) = 1.0;
  const AdmmProblem q{dense_operator(a), diff1d(4), Vector::Ones(3), 1.0, 1.0};
  // diff1d annihilates constants and A sees only the first entry: F keeps full rank.
  EXPECT_NO_THROW(admm_exact(q, SolverOptions{}));
}

TEST(MultiplierUpdate, HoldsForEveryAdmmSolver) {
  const AdmmProblem p = random_problem(25, 15, 9);
  const std::vector<std::pair<std::string, std::function<SolverResult(const SolverOptions&)>>> solvers = {
      {"admm-exact", [&](const SolverOptions& o) { return admm_exact(p, o); }},
      {"ccd", [&](const SolverOptions& o) { return ccd_solve(p, o); }},
      {"lmccd", [&](const SolverOptions& o) { return lmccd_solve(p, 3, o); }},
      {"rcg", [&](const SolverOptions& o) { return rcg_solve(p, 2, o); }},
  };
  for (const auto& [name, run] : solvers) {
    Vector b_prev = Vector::Zero(14);
    const auto states = trajectory(run, 30);
    ASSERT_EQ(states.size(), 30u) << name;
    for (const auto& s : states) {
      const Vector bu = p.b_op.apply(s.u);
      EXPECT_LE((s.b - b_prev - s.z + bu).norm(), 1e-12 * std::max(1.0, bu.norm())) << name;
      EXPECT_EQ(s.z, shrink(s.z, 1e-300)) << name;
      b_prev = s.b;
    }
  }
}

TEST(Ccd, SingleUnknownMatchesExactFirstIteration) {
  std::mt19937_64 rng(3);
  const AdmmProblem p{dense_operator(random_matrix(3, 1, rng)), identity_operator(1), random_vector(3, rng), 1.5, 0.8};
  SolverOptions o;
  o.max_iters = 1;
  EXPECT_LE(rel_diff(ccd_solve(p, o).state.u, admm_exact(p, o).state.u), 1e-14);
}

TEST(Ccd, ConvergesToExactAdmmLimit) {
  const AdmmProblem p = random_problem(40, 30, 42);
  SolverOptions o;
  o.max_iters = 500;
  EXPECT_LE(rel_diff(ccd_solve(p, o).state.u, oracle(p).state.u), 1e-6);
}

TEST(Lmccd, LargeMemoryReproducesCcd) {
  const AdmmProblem p = random_problem(30, 20, 4);
  const auto ccd = trajectory([&](const SolverOptions& o) { return ccd_solve(p, o); }, 60);
  const auto lm = trajectory([&](const SolverOptions& o) { return lmccd_solve(p, 60, o); }, 60);
  ASSERT_EQ(ccd.size(), lm.size());
  for (std::size_t k = 0; k < ccd.size(); ++k) EXPECT_LE(rel_diff(lm[k].u, ccd[k].u), 1e-12) << k;
}

TEST(Lmccd, ZeroMemoryStillConverges) {
  const AdmmProblem p = random_problem(14, 8, 5);
  SolverOptions o;
  o.max_iters = 5000;
  EXPECT_LE(rel_diff(lmccd_solve(p, 0, o).state.u, oracle(p).state.u), 1e-6);
}

TEST(Lmccd, NegativeMemoryRejected) {
  const AdmmProblem p = random_problem(6, 4, 6);
  EXPECT_THROW(lmccd_solve(p, -1, SolverOptions{}), ParameterError);
}

TEST(Rcg, ManyInnerStepsReproduceExactAdmm) {
  const AdmmProblem p = random_problem(24, 12, 8);
  const auto exact = trajectory([&](const SolverOptions& o) { return admm_exact(p, o); }, 50);
  const auto rcg = trajectory([&](const SolverOptions& o) { return rcg_solve(p, 24, o); }, 50);
  for (std::size_t k = 0; k < exact.size(); ++k) EXPECT_LE(rel_diff(rcg[k].u, exact[k].u), 1e-8) << k;
}

TEST(Rcg, SingleInnerStepPerOuterIteration) {
  const AdmmProblem p = random_problem(12, 6, 10);
  SolverOptions o;
  o.max_iters = 15;
  const SolverResult r = rcg_solve(p, 1, o);
  ASSERT_EQ(r.inner_iterations.size(), 15u);
  for (int k : r.inner_iterations) EXPECT_EQ(k, 1);
  EXPECT_THROW(rcg_solve(p, 0, o), ParameterError);
}

TEST(Scd, StationaryRhsMatchesCgne) {
  std::mt19937_64 rng(12);
  const auto f = stack(dense_operator(random_matrix(12, 6, rng)), identity_operator(6), 1.0, 0.0);
  const Vector v = random_vector(18, rng);
  ScdOptions o;
  o.max_iters = 6;
  o.on_iteration = [&](int k, const Vector& u_next, const DirectionSet&) {
    EXPECT_LE(rel_diff(u_next, cgne_solve(f, v, Vector::Zero(6), k + 1)), 1e-8) << k;
  };
  scd_solve(f, [&](int, const Vector&) { return v; }, o);
}

TEST(Scd, ZeroRhsStaysAtZero) {
  std::mt19937_64 rng(13);
  const auto f = stack(dense_operator(random_matrix(9, 5, rng)), diff1d(5), 1.0, 1.0);
  ScdOptions o;
  o.max_iters = 8;
  std::size_t stored = 0;
  std::size_t degenerate = 0;
  o.on_iteration = [&](int, const Vector& u, const DirectionSet& store) {
    EXPECT_EQ(u, Vector::Zero(5));
    stored = store.size();
    degenerate = store.n_degenerate();
  };
  const ScdResult r = scd_solve(f, [](int, const Vector&) { return Vector::Zero(13); }, o);
  EXPECT_EQ(r.u, Vector::Zero(5));
  EXPECT_GE(degenerate + 1, stored);
}

TEST(Scd, ConjugacyAndResidualOrthogonalityWithDriftingRhs) {
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
      EXPECT_LE(rel_diff(f.apply(store.p(i)), store.q(i)), 1e-12) << "q != F p at " << i;
    }
  };
  scd_solve(f, [&](int k, const Vector&) { return rhs[static_cast<std::size_t>(k)]; }, o);
  EXPECT_LE(worst_conj, 1e-8);
  EXPECT_LE(worst_orth, 1e-8);
}

TEST(ScdMm, InactiveConstraintGivesLeastSquaresSolution) {
  std::mt19937_64 rng(15);
  const auto a = dense_operator(random_matrix(10, 6, rng));
  const auto b = diff1d(6);
  const Vector d = random_vector(10, rng);
  const Vector u_ls = direct_ls_solve(stack(a, b, 1.0, 0.0), stack(a, b, 1.0, 0.0).stack_rhs(d, Vector::Zero(5)));
  SolverOptions o;
  o.max_iters = 1000;
  const SolverResult r = scd_mm_solve(a, b, d, b.apply(u_ls), 1.0, o);
  EXPECT_LE(rel_diff(r.state.u, u_ls), 1e-8);
}

TEST(ScdMm, MatchesKktSolution) {
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
  EXPECT_LE(rel_diff(r.state.u, expected), 1e-6);
  EXPECT_LE((bm * r.state.u - c).norm(), 1e-8);
}

TEST(ScdMm, FeasibleInstanceReachesConstraint) {
  std::mt19937_64 rng(17);
  const auto a = dense_operator(random_matrix(20, 12, rng));
  const auto b = dense_operator(random_matrix(3, 12, rng));
  const Vector c = b.apply(random_vector(12, rng));
  SolverOptions o;
  o.max_iters = 1000;
  const SolverResult r = scd_mm_solve(a, b, random_vector(20, rng), c, 1.0, o);
  EXPECT_LE((b.apply(r.state.u) - c).norm(), 1e-8);
}

TEST(Fista, ZetaSequence) {
  EXPECT_DOUBLE_EQ(fista_next_zeta(1.0), (1.0 + std::sqrt(5.0)) / 2.0);
  double zeta = 1.0;
  for (int k = 0; k < 50; ++k) {
    const double next = fista_next_zeta(zeta);
    EXPECT_GT(next, zeta);
    zeta = next;
  }
}

TEST(Ista, ShrunkDataIsFixedPointForIdentity) {
  const Vector d{{3.0, -0.5, 1.2, -2.0}};
  SolverOptions o;
  o.max_iters = 5;
  const SolverResult r = ista_solve(identity_operator(4), d, 1.0, 1.0, o);
  EXPECT_EQ(r.state.u, shrink(d, 1.0));
}

TEST(Ista, OversizedStepDiverges) {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 2.0;  // sigma_max = 2: steps above 2 / (alpha * 4) are unstable
  SolverOptions o;
  o.max_iters = 1000;
  const SolverResult r = ista_solve(dense_operator(a), Vector{{1.0, 5.0}}, 1.0, 1.0, o);
  EXPECT_EQ(r.stop, StopReason::kDiverged);
  EXPECT_LT(r.state.iteration, 1000);
}

TEST(ProxGradient, IdentityLimitsAgree) {
  std::mt19937_64 rng(18);
  const Vector d = 3.0 * random_vector(20, rng);
  SolverOptions o;
  o.max_iters = 2000;
  o.tol = 1e-14;
  const Vector expected = shrink(d, 0.5);
  EXPECT_LE(rel_diff(ista_solve(identity_operator(20), d, 2.0, std::nullopt, o).state.u, expected), 1e-10);
  EXPECT_LE(rel_diff(fista_solve(identity_operator(20), d, 2.0, std::nullopt, o).state.u, expected), 1e-10);
}

TEST(ProxGradient, FistaBeatsIstaOnIllConditionedInstance) {
  std::mt19937_64 rng(19);
  const Index n = 50;
  Eigen::JacobiSVD<Matrix> svd(random_matrix(n, n, rng), Eigen::ComputeFullU | Eigen::ComputeFullV);
  Vector sigma(n);
  for (Index i = 0; i < n; ++i) sigma[i] = std::pow(10.0, -3.0 * static_cast<double>(i) / (n - 1));
  const auto a = dense_operator(svd.matrixU() * sigma.asDiagonal() * svd.matrixV().transpose());
  const Vector d = random_vector(n, rng);
  SolverOptions o;
  o.max_iters = 200;
  const double fista = fista_solve(a, d, 50.0, std::nullopt, o).record.back().objective;
  const double ista = ista_solve(a, d, 50.0, std::nullopt, o).record.back().objective;
  EXPECT_LE(fista, ista);
}

TEST(ProxGradient, DefaultStep) {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 10.0;
  EXPECT_NEAR(default_prox_step(dense_operator(a), 2.0), 0.95 / 200.0, 1e-12);
}

TEST(CostAccounting, TwentyIterationsMatchTheCostModel) {
  const AdmmProblem p = random_problem(18, 10, 20);
  SolverOptions o;
  o.max_iters = 20;
  auto check = [](const SolverResult& r, std::int64_t a, std::int64_t at, const std::string& name) {
    EXPECT_EQ(r.state.iteration, 20) << name;
    EXPECT_EQ(r.ops.a, a) << name;
    EXPECT_EQ(r.ops.at, at) << name;
    EXPECT_EQ(r.record.back().ops_a, a) << name;
    EXPECT_EQ(r.record.back().ops_at, at) << name;
  };
  check(ccd_solve(p, o), 21, 21, "ccd");
  check(lmccd_solve(p, 4, o), 21, 21, "lmccd");
  for (int nc : {1, 3, 7}) check(rcg_solve(p, nc, o), 20 * (nc + 1), 20 * nc, "rcg" + std::to_string(nc));
  check(admm_exact(p, o), 10, 0, "admm-exact");
  check(ista_solve(p.a_op, p.d, 1.0, std::nullopt, o), 20, 20, "ista");
  check(fista_solve(p.a_op, p.d, 1.0, std::nullopt, o), 20, 20, "fista");
  check(scd_mm_solve(p.a_op, p.b_op, p.d, Vector::Zero(9), 1.0, o), 21, 21, "scd-mm");

  // Per-row counters grow by exactly the per-iteration cost.
  const SolverResult r = rcg_solve(p, 3, o);
  for (std::size_t k = 1; k < r.record.size(); ++k) {
    EXPECT_EQ(r.record.rows[k].ops_a - r.record.rows[k - 1].ops_a, 4);
    EXPECT_EQ(r.record.rows[k].ops_at - r.record.rows[k - 1].ops_at, 3);
  }
}

TEST(Budget, StopsAtLastAffordableIteration) {
  const AdmmProblem p = random_problem(18, 10, 21);
  SolverOptions o;
  o.max_iters = 1000;
  o.budget = 100;
  const SolverResult ccd = ccd_solve(p, o);
  EXPECT_EQ(ccd.stop, StopReason::kBudget);
  EXPECT_EQ(ccd.state.iteration, 49);
  EXPECT_EQ(ccd.ops.combined(), 100);
  const SolverResult rcg = rcg_solve(p, 1, o);
  EXPECT_EQ(rcg.state.iteration, 33);
  EXPECT_EQ(rcg.ops.combined(), 99);
  const SolverResult fista = fista_solve(p.a_op, p.d, 1.0, std::nullopt, o);
  EXPECT_EQ(fista.state.iteration, 50);
  o.budget = 5;
  const SolverResult exact = admm_exact(p, o);
  EXPECT_EQ(exact.state.iteration, 0);
  EXPECT_EQ(exact.stop, StopReason::kBudget);
}

TEST(Stopping, RelativeChangeTolerance) {
  const AdmmProblem p = random_problem(18, 10, 22);
  SolverOptions o;
  o.max_iters = 100000;
  o.tol = 1e-6;
  const SolverResult r = ccd_solve(p, o);
  EXPECT_EQ(r.stop, StopReason::kConverged);
  EXPECT_LE(r.record.back().rel_change, 1e-6);
  for (std::size_t k = 0; k + 1 < r.record.size(); ++k) EXPECT_GT(r.record.rows[k].rel_change, 1e-6);
}

TEST(Record, RowsTrackIterationsAndTruth) {
  const AdmmProblem p = random_problem(18, 10, 23);
  SolverOptions o;
  o.max_iters = 12;
  o.truth = Vector::Ones(10);
  const SolverResult r = lmccd_solve(p, 5, o);
  ASSERT_EQ(r.record.size(), 12u);
  for (std::size_t k = 0; k < r.record.size(); ++k) {
    EXPECT_EQ(r.record.rows[k].iteration, static_cast<int>(k) + 1);
    if (k > 0) EXPECT_GE(r.record.rows[k].ops_a, r.record.rows[k - 1].ops_a);
  }
  EXPECT_NEAR(r.record.back().rel_error, relative_error(r.state.u, *o.truth), 1e-14);
  o.truth.reset();
  EXPECT_TRUE(std::isnan(lmccd_solve(p, 5, o).record.back().rel_error));
}

TEST(Determinism, IdenticalRunsGiveIdenticalRecords) {
  const AdmmProblem p = random_problem(18, 10, 24);
  SolverOptions o;
  o.max_iters = 40;
  EXPECT_EQ(convergence_csv(lmccd_solve(p, 7, o).record), convergence_csv(lmccd_solve(p, 7, o).record));
}

}  // namespace
}  // namespace ccd
