#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ccd {

/// One outer iteration's diagnostics. rel_error is NaN when no truth model is known.
struct ConvergenceRow {
  int iteration = 0;
  std::int64_t ops_a = 0;
  std::int64_t ops_at = 0;
  double objective = 0.0;
  double primal_residual = 0.0;
  double rel_change = 0.0;
  double rel_error = 0.0;
};

struct ConvergenceRecord {
  std::vector<ConvergenceRow> rows;

  std::size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }
  const ConvergenceRow& back() const { return rows.back(); }
};

/// Column order of convergence.csv; stable within a major version.
inline constexpr const char* kConvergenceCsvHeader =
    "iter,ops_A,ops_At,objective,primal_residual,rel_change,rel_error";

/// Writes the header and one line per row with 17 significant digits.
void write_convergence_csv(std::ostream& out, const ConvergenceRecord& record);
std::string convergence_csv(const ConvergenceRecord& record);

}  // namespace ccd
