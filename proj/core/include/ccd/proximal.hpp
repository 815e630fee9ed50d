#pragma once

#include "ccd/linear_operator.hpp"

namespace ccd {

/// Soft thresholding: sign(y_i) * max(|y_i| - gamma, 0), the prox of gamma*||.||_1.
///
/// Entries with |y_i| == gamma map to exactly 0; zero inputs stay zero.
Vector shrink(const Vector& y, double gamma);
double shrink(double y, double gamma);

/// ||B u||_1 + (alpha/2) ||A u - d||_2^2
class Objective {
 public:
  Objective(LinearOperator a_op, LinearOperator b_op, Vector d, double alpha);

  double value(const Vector& u) const;

  const LinearOperator& a_op() const { return a_; }
  const LinearOperator& b_op() const { return b_; }
  const Vector& data() const { return d_; }
  double alpha() const { return alpha_; }

 private:
  LinearOperator a_;
  LinearOperator b_;
  Vector d_;
  double alpha_;
};

}  // namespace ccd
