#pragma once

#include "ccd/linear_operator.hpp"

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>

namespace ccd {

/// Application counts for the data operator A (budgeted) and the
/// regularization operator B (tracked, never budgeted).
class OpCounter {
 public:
  explicit OpCounter(std::optional<std::int64_t> budget = std::nullopt) : budget_(budget) {}

  std::int64_t n_apply_a() const { return n_a_.load(); }
  std::int64_t n_apply_at() const { return n_at_.load(); }
  std::int64_t n_apply_b() const { return n_b_.load(); }
  std::int64_t n_apply_bt() const { return n_bt_.load(); }

  /// Combined A and A^T applications, the quantity the budget caps.
  std::int64_t combined() const { return n_apply_a() + n_apply_at(); }
  std::optional<std::int64_t> budget() const { return budget_; }

  /// True when `extra` more combined applications stay within the budget.
  bool affords(std::int64_t extra) const { return !budget_ || combined() + extra <= *budget_; }

 private:
  friend LinearOperator count_data_operator(const LinearOperator&, std::shared_ptr<OpCounter>);
  friend LinearOperator count_regularizer(const LinearOperator&, std::shared_ptr<OpCounter>);

  std::optional<std::int64_t> budget_;
  std::atomic<std::int64_t> n_a_{0};
  std::atomic<std::int64_t> n_at_{0};
  std::atomic<std::int64_t> n_b_{0};
  std::atomic<std::int64_t> n_bt_{0};
};

/// Wraps `op` so every apply/apply_adjoint bumps the A / A^T counters.
LinearOperator count_data_operator(const LinearOperator& op, std::shared_ptr<OpCounter> counter);

/// Wraps `op` so every apply/apply_adjoint bumps the B / B^T counters.
LinearOperator count_regularizer(const LinearOperator& op, std::shared_ptr<OpCounter> counter);

}  // namespace ccd
