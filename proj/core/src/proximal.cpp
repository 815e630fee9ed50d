#include "ccd/proximal.hpp"

#include <cmath>
#include <utility>

namespace ccd {

double shrink(double y, double gamma) {
  if (!(gamma > 0.0)) throw ParameterError("shrink: gamma must be > 0");
  const double mag = std::abs(y) - gamma;
  if (mag <= 0.0) return 0.0;
  return y > 0.0 ? mag : -mag;
}

Vector shrink(const Vector& y, double gamma) {
  if (!(gamma > 0.0)) throw ParameterError("shrink: gamma must be > 0");
  Vector out(y.size());
  for (Index i = 0; i < y.size(); ++i) {
    const double mag = std::abs(y[i]) - gamma;
    out[i] = mag <= 0.0 ? 0.0 : (y[i] > 0.0 ? mag : -mag);
  }
  return out;
}

Objective::Objective(LinearOperator a_op, LinearOperator b_op, Vector d, double alpha)
    : a_(std::move(a_op)), b_(std::move(b_op)), d_(std::move(d)), alpha_(alpha) {
  if (a_.n_in() != b_.n_in()) {
    throw_dimension_error("objective: B domain must match A domain", a_.n_in(), b_.n_in());
  }
  if (d_.size() != a_.n_out()) throw_dimension_error("objective: data", a_.n_out(), d_.size());
  if (!(alpha_ > 0.0)) throw ParameterError("objective: alpha must be > 0");
}

double Objective::value(const Vector& u) const {
  if (u.size() != a_.n_in()) throw_dimension_error("objective: model", a_.n_in(), u.size());
  const Vector misfit = a_.apply(u) - d_;
  return b_.apply(u).lpNorm<1>() + 0.5 * alpha_ * misfit.squaredNorm();
}

}  // namespace ccd
