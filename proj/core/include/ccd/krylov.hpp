#pragma once

#include "ccd/stacked_operator.hpp"

#include <stdexcept>

namespace ccd {

/// F^T F is singular or indefinite, so the least-squares problem has no unique minimizer.
class RankDeficientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CgneResult {
  Vector x;
  int iterations = 0;  ///< completed CG steps; fewer than requested only on breakdown
};

/// Conjugate gradients on F^T F x = F^T v, started from x0.
///
/// Cost: one F application for the starting residual, then exactly one F and
/// one F^T application per iteration (the gradient of the last iteration is
/// never formed). Each new gradient is reorthogonalized against the earlier
/// ones, which costs memory for up to min(n_iters, N) vectors but no operator
/// applications. Stops early when the squared search-direction norm drops
/// below 1e-28 of its initial value, or is exactly zero.
CgneResult cgne(const StackedOperator& f_op, const Vector& v, const Vector& x0, int n_iters);

inline Vector cgne_solve(const StackedOperator& f_op, const Vector& v, const Vector& x0,
                         int n_iters) {
  return cgne(f_op, v, x0, n_iters).x;
}

/// Dense LDL^T factorization of F^T F, reused across right-hand sides.
///
/// Construction materializes F column by column (n_in applications of F).
class NormalEquations {
 public:
  explicit NormalEquations(const StackedOperator& f_op);

  /// argmin ||F u - v||_2
  Vector solve(const Vector& v) const;

  const Matrix& f_matrix() const { return f_; }
  const Matrix& gram() const { return gram_; }

 private:
  Matrix f_;
  Matrix gram_;
  Eigen::LDLT<Matrix> ldlt_;
};

inline constexpr Index kMaxDirectUnknowns = 4096;

/// Largest eigenvalue of op^T op by power iteration from a fixed pseudo-random start.
/// Converges from below.
double largest_gram_eigenvalue(const LinearOperator& op, int n_iters);

Vector direct_ls_solve(const StackedOperator& f_op, const Vector& v);

}  // namespace ccd
