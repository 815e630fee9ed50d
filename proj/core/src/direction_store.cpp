#include "ccd/direction_store.hpp"

#include <algorithm>
#include <stdexcept>

namespace ccd {

namespace {

// Applies the degeneracy rule to a freshly built (p, q): returns delta, zeroing
// p and q and returning 1 when the direction carries no new information.
double settle_direction(Vector& p, Vector& q, double& delta_max, bool& degenerate) {
  const double delta = q.squaredNorm();
  delta_max = std::max(delta_max, delta);
  degenerate = delta <= kDegenerateDirectionTol * delta_max;
  if (!degenerate) return delta;
  p.setZero();
  q.setZero();
  return 1.0;
}

}  // namespace

DirectionSet::DirectionSet(const StackedOperator& f_op) : f_(&f_op) {}

void DirectionSet::push(Vector p, Vector q) {
  bool degenerate = false;
  const double delta = settle_direction(p, q, delta_max_, degenerate);
  p_.push_back(std::move(p));
  q_.push_back(std::move(q));
  delta_.push_back(delta);
  degenerate_.push_back(degenerate);
}

void DirectionSet::start(const Vector& v0) {
  if (!p_.empty()) throw std::logic_error("DirectionSet::start called twice");
  if (v0.size() != f_->n_out()) throw_dimension_error("direction start rhs", f_->n_out(), v0.size());
  Vector p = f_->apply_adjoint(v0);
  Vector q = f_->apply(p);
  push(std::move(p), std::move(q));
}

Vector DirectionSet::project(const Vector& v) {
  if (p_.empty()) throw std::logic_error("DirectionSet::project before start");
  if (v.size() != f_->n_out()) throw_dimension_error("direction project rhs", f_->n_out(), v.size());
  tau_.resize(p_.size());
  Vector u = Vector::Zero(f_->n_in());
  for (std::size_t i = 0; i < p_.size(); ++i) {
    tau_[i] = q_[i].dot(v) / delta_[i];
    u += tau_[i] * p_[i];
  }
  return u;
}

void DirectionSet::extend(const Vector& v_next) {
  if (tau_.size() != p_.size()) throw std::logic_error("DirectionSet::extend without project");
  if (v_next.size() != f_->n_out()) {
    throw_dimension_error("direction extend rhs", f_->n_out(), v_next.size());
  }
  r_ = v_next;
  for (std::size_t i = 0; i < q_.size(); ++i) r_ -= tau_[i] * q_[i];

  Vector p = f_->apply_adjoint(r_);
  Vector q = f_->apply(p);
  // Conjugation against the stored set, done as two modified Gram-Schmidt sweeps.
  // Same direction as a single sweep in exact arithmetic; in floating point a
  // single classical sweep loses conjugacy fast once F^T F is ill conditioned.
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t i = 0; i < q_.size(); ++i) {
      const double beta = -q_[i].dot(q) / delta_[i];
      p += beta * p_[i];
      q += beta * q_[i];
    }
  }
  push(std::move(p), std::move(q));
}

std::size_t DirectionSet::n_degenerate() const {
  return static_cast<std::size_t>(std::count(degenerate_.begin(), degenerate_.end(), true));
}

DirectionRing::DirectionRing(const StackedOperator& f_op, int memory_m)
    : f_(&f_op),
      u_tilde_(Vector::Zero(f_op.n_in())),
      v_tilde_(Vector::Zero(f_op.n_out())) {
  if (memory_m < 0) throw ParameterError("limited memory: m must be >= 0");
  capacity_ = static_cast<std::size_t>(memory_m) + 1;
}

void DirectionRing::store(std::size_t slot, Vector p, Vector q) {
  bool degenerate = false;
  const double delta = settle_direction(p, q, delta_max_, degenerate);
  if (slot == p_.size()) {
    p_.push_back(std::move(p));
    q_.push_back(std::move(q));
    delta_.push_back(delta);
  } else {
    p_[slot] = std::move(p);
    q_[slot] = std::move(q);
    delta_[slot] = delta;
  }
}

void DirectionRing::start(const Vector& v0) {
  if (!p_.empty()) throw std::logic_error("DirectionRing::start called twice");
  if (v0.size() != f_->n_out()) throw_dimension_error("direction start rhs", f_->n_out(), v0.size());
  Vector p = f_->apply_adjoint(v0);
  Vector q = f_->apply(p);
  store(0, std::move(p), std::move(q));
  head_ = 0;
}

Vector DirectionRing::project(const Vector& v) {
  if (p_.empty()) throw std::logic_error("DirectionRing::project before start");
  if (v.size() != f_->n_out()) throw_dimension_error("direction project rhs", f_->n_out(), v.size());
  const Vector free_part = v - v_tilde_;
  tau_.resize(p_.size());
  Vector u = u_tilde_;
  for (std::size_t i = 0; i < p_.size(); ++i) {
    tau_[i] = q_[i].dot(free_part) / delta_[i];
    u += tau_[i] * p_[i];
  }
  projected_ = true;
  return u;
}

void DirectionRing::extend(const Vector& v_next) {
  if (!projected_) throw std::logic_error("DirectionRing::extend without project");
  if (v_next.size() != f_->n_out()) {
    throw_dimension_error("direction extend rhs", f_->n_out(), v_next.size());
  }
  r_ = v_next;
  for (std::size_t i = 0; i < q_.size(); ++i) r_ -= tau_[i] * q_[i];
  r_ -= v_tilde_;

  Vector p = f_->apply_adjoint(r_);
  Vector q = f_->apply(p);
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t i = 0; i < q_.size(); ++i) {
      const double beta = -q_[i].dot(q) / delta_[i];
      p += beta * p_[i];
      q += beta * q_[i];
    }
  }

  ++head_;
  if (head_ == capacity_) {
    head_ = 0;
    cycle_ = true;
  }
  if (cycle_) {
    u_tilde_ += tau_[head_] * p_[head_];
    v_tilde_ += tau_[head_] * q_[head_];
  }
  store(head_, std::move(p), std::move(q));
  projected_ = false;
}

}  // namespace ccd
