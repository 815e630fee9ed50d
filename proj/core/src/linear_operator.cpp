#include "ccd/linear_operator.hpp"

#include <sstream>
#include <utility>

namespace ccd {

void throw_dimension_error(const std::string& what, Index expected, Index actual) {
  std::ostringstream msg;
  msg << what << ": expected length " << expected << ", got " << actual;
  throw DimensionError(msg.str());
}

LinearOperator::LinearOperator(std::string name, Index n_in, Index n_out, Map apply,
                               Map apply_adjoint)
    : name_(std::move(name)),
      n_in_(n_in),
      n_out_(n_out),
      apply_(std::move(apply)),
      apply_adjoint_(std::move(apply_adjoint)) {
  if (n_in_ < 1 || n_out_ < 1) {
    throw ParameterError(name_ + ": operator dimensions must be positive");
  }
}

Vector LinearOperator::apply(const Vector& x) const {
  if (x.size() != n_in_) throw_dimension_error(name_ + " apply", n_in_, x.size());
  return apply_(x);
}

Vector LinearOperator::apply_adjoint(const Vector& y) const {
  if (y.size() != n_out_) throw_dimension_error(name_ + " apply_adjoint", n_out_, y.size());
  return apply_adjoint_(y);
}

Matrix materialize(const LinearOperator& op) {
  Matrix out(op.n_out(), op.n_in());
  Vector e = Vector::Zero(op.n_in());
  for (Index j = 0; j < op.n_in(); ++j) {
    e[j] = 1.0;
    out.col(j) = op.apply(e);
    e[j] = 0.0;
  }
  return out;
}

}  // namespace ccd
