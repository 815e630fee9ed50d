#pragma once

#include "ccd/stacked_operator.hpp"

#include <vector>

namespace ccd {

/// A new direction is dropped when delta falls below this fraction of the
/// largest delta seen so far.
inline constexpr double kDegenerateDirectionTol = 1e-24;

/// Unbounded set of F^T F-conjugate directions p_i with images q_i = F p_i.
///
/// This is the engine shared by the steered, compressive and
/// multiplier-method solvers. One outer step is project(v_k) followed by
/// extend(v_{k+1}); extend() costs one F^T and one F application, start()
/// costs one of each.
class DirectionSet {
 public:
  explicit DirectionSet(const StackedOperator& f_op);

  /// p_0 = F^T v_0, q_0 = F p_0.
  void start(const Vector& v0);

  /// tau_i = q_i^T v / delta_i over all stored directions; returns sum tau_i p_i.
  Vector project(const Vector& v);

  /// Residual r = v_next - sum tau_i q_i, then a new direction from F^T r
  /// made conjugate to every stored one.
  void extend(const Vector& v_next);

  std::size_t size() const { return p_.size(); }
  const Vector& p(std::size_t i) const { return p_[i]; }
  const Vector& q(std::size_t i) const { return q_[i]; }
  double delta(std::size_t i) const { return delta_[i]; }
  double tau(std::size_t i) const { return tau_[i]; }
  bool degenerate(std::size_t i) const { return degenerate_[i]; }
  std::size_t n_degenerate() const;

  /// r_{k+1} from the most recent extend().
  const Vector& residual() const { return r_; }

 private:
  void push(Vector p, Vector q);

  const StackedOperator* f_;
  std::vector<Vector> p_;
  std::vector<Vector> q_;
  std::vector<double> delta_;
  std::vector<double> tau_;
  std::vector<bool> degenerate_;
  double delta_max_ = 0.0;
  Vector r_;
};

/// Circular buffer of m+1 conjugate directions for the limited-memory method.
///
/// When a slot is recycled its last expansion term tau_j p_j (and tau_j q_j)
/// is frozen into u_tilde (and v_tilde); projections are then taken against
/// v - v_tilde and the solution is u_tilde + sum tau_i p_i.
class DirectionRing {
 public:
  DirectionRing(const StackedOperator& f_op, int memory_m);

  void start(const Vector& v0);
  Vector project(const Vector& v);
  void extend(const Vector& v_next);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return p_.size(); }
  std::size_t head() const { return head_; }
  bool cycled() const { return cycle_; }

  const Vector& p(std::size_t slot) const { return p_[slot]; }
  const Vector& q(std::size_t slot) const { return q_[slot]; }
  double delta(std::size_t slot) const { return delta_[slot]; }
  double tau(std::size_t slot) const { return tau_[slot]; }
  const Vector& u_tilde() const { return u_tilde_; }
  const Vector& v_tilde() const { return v_tilde_; }
  const Vector& residual() const { return r_; }

 private:
  void store(std::size_t slot, Vector p, Vector q);

  const StackedOperator* f_;
  std::size_t capacity_;
  std::size_t head_ = 0;
  bool cycle_ = false;
  bool projected_ = false;
  std::vector<Vector> p_;
  std::vector<Vector> q_;
  std::vector<double> delta_;
  std::vector<double> tau_;
  double delta_max_ = 0.0;
  Vector u_tilde_;
  Vector v_tilde_;
  Vector r_;
};

}  // namespace ccd
