#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>

namespace ccd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Raised when a vector of the wrong length reaches an operator or solver.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised for out-of-range scalar parameters (grid sizes, weights, steps).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

[[noreturn]] void throw_dimension_error(const std::string& what, Index expected, Index actual);

/// Matrix-free linear map R^n_in -> R^n_out with its adjoint.
///
/// Instances are cheap to copy: the callables are expected to capture
/// immutable shared state. apply() and apply_adjoint() check lengths before
/// dispatching, so the callables themselves never see a mismatched vector.
class LinearOperator {
 public:
  using Map = std::function<Vector(const Vector&)>;

  LinearOperator() = default;
  LinearOperator(std::string name, Index n_in, Index n_out, Map apply, Map apply_adjoint);

  Index n_in() const { return n_in_; }
  Index n_out() const { return n_out_; }
  const std::string& name() const { return name_; }

  Vector apply(const Vector& x) const;
  Vector apply_adjoint(const Vector& y) const;

 private:
  std::string name_;
  Index n_in_ = 0;
  Index n_out_ = 0;
  Map apply_;
  Map apply_adjoint_;
};

/// Builds the explicit n_out x n_in matrix by applying the operator to unit vectors.
Matrix materialize(const LinearOperator& op);

}  // namespace ccd
