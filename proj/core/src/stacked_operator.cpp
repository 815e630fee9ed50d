#include "ccd/stacked_operator.hpp"
#include "ccd/op_counter.hpp"

#include <cmath>
#include <utility>

namespace ccd {

StackedOperator::StackedOperator(LinearOperator a_op, LinearOperator b_op, double alpha,
                                 double lambda)
    : a_(std::move(a_op)), b_(std::move(b_op)), alpha_(alpha), lambda_(lambda) {
  if (a_.n_in() != b_.n_in()) {
    throw_dimension_error("stack: B domain must match A domain", a_.n_in(), b_.n_in());
  }
  if (!(alpha_ > 0.0) || !std::isfinite(alpha_)) throw ParameterError("stack: alpha must be > 0");
  if (!(lambda_ >= 0.0) || !std::isfinite(lambda_)) {
    throw ParameterError("stack: lambda must be >= 0");
  }
  sqrt_alpha_ = std::sqrt(alpha_);
  sqrt_lambda_ = std::sqrt(lambda_);
}

Vector StackedOperator::apply(const Vector& u) const {
  if (u.size() != n_in()) throw_dimension_error("stacked apply", n_in(), u.size());
  Vector out(n_out());
  out.head(n_top()) = sqrt_alpha_ * a_.apply(u);
  if (lambda_ > 0.0) {
    out.tail(n_bottom()) = sqrt_lambda_ * b_.apply(u);
  } else {
    out.tail(n_bottom()).setZero();
  }
  return out;
}

Vector StackedOperator::apply_adjoint(const Vector& r) const {
  if (r.size() != n_out()) throw_dimension_error("stacked apply_adjoint", n_out(), r.size());
  Vector out = sqrt_alpha_ * a_.apply_adjoint(r.head(n_top()));
  if (lambda_ > 0.0) out += sqrt_lambda_ * b_.apply_adjoint(r.tail(n_bottom()));
  return out;
}

Vector StackedOperator::stack_rhs(const Vector& top, const Vector& bottom) const {
  if (top.size() != n_top()) throw_dimension_error("stacked rhs top", n_top(), top.size());
  if (bottom.size() != n_bottom()) {
    throw_dimension_error("stacked rhs bottom", n_bottom(), bottom.size());
  }
  Vector v(n_out());
  v.head(n_top()) = sqrt_alpha_ * top;
  v.tail(n_bottom()) = sqrt_lambda_ * bottom;
  return v;
}

LinearOperator StackedOperator::as_operator() const {
  auto self = std::make_shared<const StackedOperator>(*this);
  return LinearOperator(
      "stacked", n_in(), n_out(), [self](const Vector& u) { return self->apply(u); },
      [self](const Vector& r) { return self->apply_adjoint(r); });
}

StackedOperator stack(LinearOperator a_op, LinearOperator b_op, double alpha, double lambda) {
  return StackedOperator(std::move(a_op), std::move(b_op), alpha, lambda);
}

LinearOperator count_data_operator(const LinearOperator& op, std::shared_ptr<OpCounter> counter) {
  return LinearOperator(
      op.name(), op.n_in(), op.n_out(),
      [op, counter](const Vector& x) {
        counter->n_a_.fetch_add(1);
        return op.apply(x);
      },
      [op, counter](const Vector& y) {
        counter->n_at_.fetch_add(1);
        return op.apply_adjoint(y);
      });
}

LinearOperator count_regularizer(const LinearOperator& op, std::shared_ptr<OpCounter> counter) {
  return LinearOperator(
      op.name(), op.n_in(), op.n_out(),
      [op, counter](const Vector& x) {
        counter->n_b_.fetch_add(1);
        return op.apply(x);
      },
      [op, counter](const Vector& y) {
        counter->n_bt_.fetch_add(1);
        return op.apply_adjoint(y);
      });
}

}  // namespace ccd
