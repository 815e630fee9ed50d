#include "ccd/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace ccd {

namespace {
constexpr double kBreakdownTol = 1e-28;
}

CgneResult cgne(const StackedOperator& f_op, const Vector& v, const Vector& x0, int n_iters) {
  if (n_iters < 1) throw ParameterError("cgne: n_iters must be >= 1");
  if (v.size() != f_op.n_out()) throw_dimension_error("cgne rhs", f_op.n_out(), v.size());
  if (x0.size() != f_op.n_in()) throw_dimension_error("cgne x0", f_op.n_in(), x0.size());

  CgneResult out{x0, 0};
  Vector r = v - f_op.apply(out.x);
  Vector s = f_op.apply_adjoint(r);
  Vector p = s;
  double gamma = s.squaredNorm();
  const double p0_norm2 = gamma;
  if (p0_norm2 == 0.0) return out;

  // Gradients are mutually orthogonal in exact arithmetic; enforcing it keeps
  // finite termination intact in floating point.
  const Index max_basis = std::min<Index>(n_iters, f_op.n_in());
  Matrix basis(f_op.n_in(), max_basis);
  Index n_basis = 0;
  auto remember = [&](const Vector& g, double g_norm2) {
    if (n_basis < max_basis && g_norm2 > 0.0) basis.col(n_basis++) = g / std::sqrt(g_norm2);
  };
  remember(s, gamma);

  for (int it = 1; it <= n_iters; ++it) {
    const Vector q = f_op.apply(p);
    const double qq = q.squaredNorm();
    if (qq == 0.0) break;
    const double step = gamma / qq;
    out.x += step * p;
    r -= step * q;
    out.iterations = it;
    if (it == n_iters) break;

    s = f_op.apply_adjoint(r);
    for (int pass = 0; pass < 2; ++pass) {
      const auto q_basis = basis.leftCols(n_basis);
      s.noalias() -= q_basis * (q_basis.transpose() * s);
    }
    const double gamma_next = s.squaredNorm();
    remember(s, gamma_next);
    p = s + (gamma_next / gamma) * p;
    gamma = gamma_next;
    if (p.squaredNorm() < kBreakdownTol * p0_norm2) break;
  }
  return out;
}

NormalEquations::NormalEquations(const StackedOperator& f_op) {
  if (f_op.n_in() > kMaxDirectUnknowns) {
    throw ParameterError("direct solve: " + std::to_string(f_op.n_in()) +
                         " unknowns exceed the dense limit of " +
                         std::to_string(kMaxDirectUnknowns));
  }
  f_ = materialize(f_op.as_operator());
  gram_ = f_.transpose() * f_;
  ldlt_.compute(gram_);
  if (ldlt_.info() != Eigen::Success) {
    throw RankDeficientError("direct solve: LDLT factorization of F^T F failed");
  }
  const auto diag = ldlt_.vectorD();
  const double dmax = diag.cwiseAbs().maxCoeff();
  const double floor = static_cast<double>(f_op.n_in()) *
                       std::numeric_limits<double>::epsilon() * dmax;
  if (dmax == 0.0 || diag.minCoeff() <= floor) {
    throw RankDeficientError(
        "direct solve: F^T F is singular or indefinite (smallest pivot " +
        std::to_string(diag.minCoeff()) + ", largest " + std::to_string(dmax) +
        "); A and B must give F maximal column rank");
  }
}

Vector NormalEquations::solve(const Vector& v) const {
  if (v.size() != f_.rows()) throw_dimension_error("direct solve rhs", f_.rows(), v.size());
  return ldlt_.solve(f_.transpose() * v);
}

double largest_gram_eigenvalue(const LinearOperator& op, int n_iters) {
  if (n_iters < 1) throw ParameterError("power iteration: n_iters must be >= 1");
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Vector x(op.n_in());
  for (Index i = 0; i < x.size(); ++i) x[i] = unit(rng);
  x.normalize();
  double estimate = 0.0;
  for (int it = 0; it < n_iters; ++it) {
    Vector y = op.apply_adjoint(op.apply(x));
    estimate = x.dot(y);
    const double norm = y.norm();
    if (norm == 0.0) return 0.0;
    x = y / norm;
  }
  return estimate;
}

Vector direct_ls_solve(const StackedOperator& f_op, const Vector& v) {
  return NormalEquations(f_op).solve(v);
}

}  // namespace ccd
