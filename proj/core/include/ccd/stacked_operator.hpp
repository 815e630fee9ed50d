#pragma once

#include "ccd/linear_operator.hpp"

namespace ccd {

/// F = [sqrt(alpha) A; sqrt(lambda) B], the operator of every ADMM u-step.
///
/// Range vectors are laid out as [top (M); bottom (K)].
class StackedOperator {
 public:
  StackedOperator(LinearOperator a_op, LinearOperator b_op, double alpha, double lambda);

  Index n_in() const { return a_.n_in(); }
  Index n_out() const { return a_.n_out() + b_.n_out(); }
  Index n_top() const { return a_.n_out(); }
  Index n_bottom() const { return b_.n_out(); }

  double alpha() const { return alpha_; }
  double lambda() const { return lambda_; }
  const LinearOperator& a_op() const { return a_; }
  const LinearOperator& b_op() const { return b_; }

  Vector apply(const Vector& u) const;
  Vector apply_adjoint(const Vector& r) const;

  /// [sqrt(alpha) top; sqrt(lambda) bottom]
  Vector stack_rhs(const Vector& top, const Vector& bottom) const;

  LinearOperator as_operator() const;

 private:
  LinearOperator a_;
  LinearOperator b_;
  double alpha_;
  double lambda_;
  double sqrt_alpha_;
  double sqrt_lambda_;
};

/// alpha must be positive and lambda non-negative; lambda = 0 drops the
/// regularization block while keeping its rows.
StackedOperator stack(LinearOperator a_op, LinearOperator b_op, double alpha, double lambda);

}  // namespace ccd
