#pragma once

#include "ccd/convergence.hpp"
#include "ccd/direction_store.hpp"
#include "ccd/linear_operator.hpp"
#include "ccd/stacked_operator.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace ccd {

/// min ||B u||_1 + (alpha/2) ||A u - d||^2, split as z = B u with penalty weight lambda.
struct AdmmProblem {
  LinearOperator a_op;
  LinearOperator b_op;
  Vector d;
  double alpha = 1.0;
  double lambda = 1.0;
};

/// The ADMM triple. b is the scaled multiplier (mu / lambda).
struct SolverState {
  Vector u;
  Vector z;
  Vector b;
  int iteration = 0;
};

enum class StopReason { kMaxIterations, kConverged, kBudget, kDiverged };
std::string_view to_string(StopReason reason);

struct SolverOptions {
  int max_iters = 1000;
  /// Stop once ||u_{k+1} - u_k|| / ||u_k|| <= tol (absolute change when u_k = 0).
  double tol = 0.0;
  /// Cap on combined A and A^T applications; the run ends at the last outer
  /// iteration that fits entirely inside it.
  std::optional<std::int64_t> budget;
  /// Enables the rel_error column.
  std::optional<Vector> truth;
  /// Called after every completed outer iteration.
  std::function<void(const SolverState&)> on_iterate;
};

struct OpCounts {
  std::int64_t a = 0;
  std::int64_t at = 0;
  std::int64_t b = 0;
  std::int64_t bt = 0;
  std::int64_t combined() const { return a + at; }
};

struct SolverResult {
  SolverState state;
  ConvergenceRecord record;
  StopReason stop = StopReason::kMaxIterations;
  OpCounts ops;
  /// CG steps taken inside each outer iteration (restarted CG only).
  std::vector<int> inner_iterations;
  /// Step size used (proximal-gradient solvers only).
  double step = 0.0;
};

/// ADMM with the u-step solved by a dense factorization of F^T F.
///
/// Setup materializes F (n_in applications of A); iterations then cost no
/// operator applications. Throws RankDeficientError if F^T F is singular.
SolverResult admm_exact(const AdmmProblem& problem, const SolverOptions& options);

/// Compressive conjugate directions: ADMM whose u-step is one projection onto
/// an unbounded, recycled set of F^T F-conjugate directions. One A and one A^T
/// application per outer iteration, plus one of each to seed the first direction.
SolverResult ccd_solve(const AdmmProblem& problem, const SolverOptions& options);

/// Limited-memory compressive conjugate directions with m+1 directions in a
/// circular buffer. Same per-iteration cost as ccd_solve.
SolverResult lmccd_solve(const AdmmProblem& problem, int memory_m, const SolverOptions& options);

/// ADMM with the u-step approximated by n_cg CGNE iterations hot-started from u_k.
/// Each outer iteration costs n_cg + 1 applications of A and n_cg of A^T.
SolverResult rcg_solve(const AdmmProblem& problem, int n_cg, const SolverOptions& options);

/// Supplies v_k given k and the current iterate u_k (u_0 = 0).
using RhsProvider = std::function<Vector(int k, const Vector& u_k)>;

struct ScdOptions {
  int max_iters = 100;
  double tol = 0.0;
  /// Called after extend() in iteration k, i.e. once r_{k+1} and the new direction exist.
  std::function<void(int k, const Vector& u_next, const DirectionSet& store)> on_iteration;
};

struct ScdResult {
  Vector u;
  ConvergenceRecord record;  ///< objective column holds 0.5 ||F u_{k+1} - v_k||^2
  StopReason stop = StopReason::kMaxIterations;
  OpCounts ops;
};

/// Steered conjugate directions for ||F u - v_k|| -> min with a drifting right-hand side.
ScdResult scd_solve(const StackedOperator& f_op, const RhsProvider& rhs, const ScdOptions& options);

/// Steered conjugate directions + method of multipliers for
/// min ||A u - d||^2 subject to B u = c (F built with alpha = 1).
///
/// state.z holds c; primal_residual is ||B u - c||.
SolverResult scd_mm_solve(const LinearOperator& a_op, const LinearOperator& b_op, const Vector& d,
                          const Vector& c, double lambda, const SolverOptions& options);

/// Default proximal-gradient step 0.95 / (alpha * sigma_max(A)^2), sigma from 100 power iterations.
double default_prox_step(const LinearOperator& a_op, double alpha);

/// zeta_{k+1} = (1 + sqrt(1 + 4 zeta_k^2)) / 2
double fista_next_zeta(double zeta);

/// ISTA for ||u||_1 + (alpha/2)||A u - d||^2. Stops with kDiverged after the
/// objective rises ten iterations in a row. state.z mirrors state.u.
SolverResult ista_solve(const LinearOperator& a_op, const Vector& d, double alpha,
                        std::optional<double> step, const SolverOptions& options);

/// FISTA for the same problem. state.u is the thresholded iterate.
SolverResult fista_solve(const LinearOperator& a_op, const Vector& d, double alpha,
                         std::optional<double> step, const SolverOptions& options);

}  // namespace ccd
