#pragma once

#include "ccd/harness.hpp"
#include "ccd/operators.hpp"
#include "ccd/solvers.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ccd {

enum class ProblemKind { kDenoise2d, kSpikes1d, kPressure2d, kCustom };
enum class SolverKind { kAdmmExact, kCcd, kLmccd, kRcg, kFista, kIsta, kScdMm };
enum class RegularizerKind { kIdentity, kDiff1d, kGrad2d };

std::string_view to_string(ProblemKind kind);
std::string_view to_string(SolverKind kind);
std::string_view to_string(RegularizerKind kind);
std::optional<ProblemKind> parse_problem_kind(std::string_view name);
std::optional<SolverKind> parse_solver_kind(std::string_view name);
std::optional<RegularizerKind> parse_regularizer_kind(std::string_view name);

/// Invalid experiment description; `field` names the offending entry.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// A solver and its own knobs. Knobs that do not belong to `kind` must stay empty.
struct SolverSpec {
  SolverKind kind = SolverKind::kLmccd;
  std::optional<int> memory_m;  ///< lmccd
  std::optional<int> n_cg;      ///< rcg
  std::optional<double> step;   ///< ista / fista; default from power iteration

  /// e.g. "lmccd_m100", "rcg_ncg5", "fista"
  std::string label() const;
};

/// User-supplied operator and data for problem = custom.
struct CustomProblem {
  Matrix a;
  Vector d;
  std::optional<Vector> truth;
  RegularizerKind regularizer = RegularizerKind::kDiff1d;
  GridShape grid;  ///< model grid; needed by grad2d
};

struct ExperimentConfig {
  ProblemKind problem = ProblemKind::kDenoise2d;
  GridShape grid{64, 64};  ///< model grid (spikes: nx = N, ny = 1)
  Index n_data = 0;        ///< spikes only; 0 means equal to the model size
  KernelParams kernel;
  NoiseSpec noise;
  double alpha = 10.0;
  double lambda = 1.0;
  std::optional<std::int64_t> budget;
  int max_iters = 100000;
  double tol = 0.0;
  std::optional<Vector> constraint;  ///< scd-mm right-hand side c
  std::optional<CustomProblem> custom;
};

/// Default settings for the three experiments, with the default solver of each.
struct Preset {
  ExperimentConfig config;
  SolverSpec solver;
};
std::optional<Preset> find_preset(std::string_view name);

/// Operators, data and truth built from a config. Deterministic in the config.
struct ProblemInstance {
  LinearOperator a;
  LinearOperator b;
  Vector clean;  ///< noise-free data (custom: equal to d)
  Vector d;
  std::optional<Vector> truth;
  GridShape model_grid;
  GridShape data_grid;
};

/// Throws ConfigError for out-of-range problem settings. lambda = 0 is allowed
/// here (condition estimates); solver runs need lambda > 0.
void validate_problem(const ExperimentConfig& config);

/// validate_problem plus the solver's own knobs; knobs that do not fit `solver` are rejected.
void validate(const ExperimentConfig& config, const SolverSpec& solver);

ProblemInstance build_problem(const ExperimentConfig& config);

/// Runs one solver on an already built instance.
SolverResult run_solver(const ProblemInstance& instance, const ExperimentConfig& config,
                        const SolverSpec& solver);

/// Condition estimate of F = [sqrt(alpha) A; sqrt(lambda) B] for the configured problem.
ConditionEstimate condition_of(const ProblemInstance& instance, const ExperimentConfig& config,
                               int n_power_iters);

}  // namespace ccd
