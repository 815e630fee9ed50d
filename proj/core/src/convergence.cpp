#include "ccd/convergence.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace ccd {

namespace {

// %.17g is locale-independent for the C locale and round-trips doubles.
std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

void write_convergence_csv(std::ostream& out, const ConvergenceRecord& record) {
  out << kConvergenceCsvHeader << '\n';
  for (const auto& row : record.rows) {
    out << row.iteration << ',' << row.ops_a << ',' << row.ops_at << ','
        << format_double(row.objective) << ',' << format_double(row.primal_residual) << ','
        << format_double(row.rel_change) << ',' << format_double(row.rel_error) << '\n';
  }
}

std::string convergence_csv(const ConvergenceRecord& record) {
  std::ostringstream out;
  write_convergence_csv(out, record);
  return out.str();
}

}  // namespace ccd
