#pragma once

#include "ccd/linear_operator.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace ccd::test {

inline Vector random_vector(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

inline Matrix random_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  return m;
}

/// |<Ax, y> - <x, A^T y>| / (||Ax|| ||y||), worst over n_pairs random pairs.
inline double worst_adjoint_defect(const LinearOperator& op, int n_pairs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int k = 0; k < n_pairs; ++k) {
    const Vector x = random_vector(op.n_in(), rng);
    const Vector y = random_vector(op.n_out(), rng);
    const Vector ax = op.apply(x);
    const double scale = ax.norm() * y.norm();
    const double defect = std::abs(ax.dot(y) - x.dot(op.apply_adjoint(y)));
    worst = std::max(worst, scale > 0.0 ? defect / scale : defect);
  }
  return worst;
}

inline double rel_diff(const Vector& a, const Vector& b) {
  const double base = b.norm();
  return base > 0.0 ? (a - b).norm() / base : (a - b).norm();
}

}  // namespace ccd::test
