#include "ccd/experiment.hpp"

#include <array>
#include <cmath>
#include <utility>

namespace ccd {

namespace {

template <class Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::pair<std::string_view, Enum>, N>& table,
                           std::string_view name) {
  for (const auto& [key, value] : table) {
    if (key == name) return value;
  }
  return std::nullopt;
}

template <class Enum, std::size_t N>
std::string_view name_of(const std::array<std::pair<std::string_view, Enum>, N>& table, Enum e) {
  for (const auto& [key, value] : table) {
    if (value == e) return key;
  }
  return "unknown";
}

constexpr std::array<std::pair<std::string_view, ProblemKind>, 4> kProblemNames{{
    {"denoise2d", ProblemKind::kDenoise2d},
    {"spikes1d", ProblemKind::kSpikes1d},
    {"pressure2d", ProblemKind::kPressure2d},
    {"custom", ProblemKind::kCustom},
}};

constexpr std::array<std::pair<std::string_view, SolverKind>, 7> kSolverNames{{
    {"admm-exact", SolverKind::kAdmmExact},
    {"ccd", SolverKind::kCcd},
    {"lmccd", SolverKind::kLmccd},
    {"rcg", SolverKind::kRcg},
    {"fista", SolverKind::kFista},
    {"ista", SolverKind::kIsta},
    {"scd-mm", SolverKind::kScdMm},
}};

constexpr std::array<std::pair<std::string_view, RegularizerKind>, 3> kRegularizerNames{{
    {"identity", RegularizerKind::kIdentity},
    {"diff1d", RegularizerKind::kDiff1d},
    {"grad2d", RegularizerKind::kGrad2d},
}};

bool is_prox_gradient(SolverKind kind) {
  return kind == SolverKind::kFista || kind == SolverKind::kIsta;
}

RegularizerKind regularizer_of(const ExperimentConfig& config) {
  switch (config.problem) {
    case ProblemKind::kDenoise2d:
    case ProblemKind::kPressure2d: return RegularizerKind::kGrad2d;
    case ProblemKind::kSpikes1d: return RegularizerKind::kIdentity;
    case ProblemKind::kCustom: break;
  }
  return config.custom ? config.custom->regularizer : RegularizerKind::kIdentity;
}

Index model_size(const ExperimentConfig& config) {
  if (config.problem == ProblemKind::kCustom && config.custom) return config.custom->a.cols();
  return config.grid.size();
}

LinearOperator make_regularizer(RegularizerKind kind, Index n, const GridShape& grid) {
  switch (kind) {
    case RegularizerKind::kIdentity: return identity_operator(n);
    case RegularizerKind::kDiff1d: return diff1d(n);
    case RegularizerKind::kGrad2d: return grad2d_aniso(grid.nx, grid.ny);
  }
  throw ParameterError("unknown regularizer");
}

}  // namespace

std::string_view to_string(ProblemKind kind) { return name_of(kProblemNames, kind); }
std::string_view to_string(SolverKind kind) { return name_of(kSolverNames, kind); }
std::string_view to_string(RegularizerKind kind) { return name_of(kRegularizerNames, kind); }
std::optional<ProblemKind> parse_problem_kind(std::string_view name) {
  return lookup(kProblemNames, name);
}
std::optional<SolverKind> parse_solver_kind(std::string_view name) {
  return lookup(kSolverNames, name);
}
std::optional<RegularizerKind> parse_regularizer_kind(std::string_view name) {
  return lookup(kRegularizerNames, name);
}

std::string SolverSpec::label() const {
  std::string out(to_string(kind));
  if (kind == SolverKind::kLmccd && memory_m) out += "_m" + std::to_string(*memory_m);
  if (kind == SolverKind::kRcg && n_cg) out += "_ncg" + std::to_string(*n_cg);
  return out;
}

std::optional<Preset> find_preset(std::string_view name) {
  Preset p;
  if (name == "denoise") {
    p.config.problem = ProblemKind::kDenoise2d;
    p.config.grid = {64, 64};
    p.config.noise = {0.15, 0.25, 1};
    p.config.alpha = 10.0;
    p.config.lambda = 1.0;
    p.config.budget = 100;
    p.solver = {SolverKind::kLmccd, 50, std::nullopt, std::nullopt};
    return p;
  }
  if (name == "spikes") {
    p.config.problem = ProblemKind::kSpikes1d;
    p.config.grid = {500, 1};
    p.config.n_data = 500;
    p.config.kernel = {0.1, 2.0, 1e-2};
    p.config.noise = {0.15, 0.2, 1};
    p.config.alpha = 1e4;
    p.config.lambda = 0.05;
    p.config.budget = 100;
    p.solver = {SolverKind::kLmccd, 100, std::nullopt, std::nullopt};
    return p;
  }
  if (name == "pressure") {
    p.config.problem = ProblemKind::kPressure2d;
    p.config.grid = {50, 50};
    p.config.kernel = {0.455, 1.2, 5.8515e3};
    p.config.noise = {0.15, 0.25, 1};
    p.config.alpha = 0.1;
    p.config.lambda = 10.0;
    p.config.budget = 100;
    p.solver = {SolverKind::kLmccd, 100, std::nullopt, std::nullopt};
    return p;
  }
  return std::nullopt;
}

void validate(const ExperimentConfig& c, const SolverSpec& s) {
  validate_problem(c);
  if (!(c.lambda > 0.0)) throw ConfigError("lambda", "must be > 0 for a solver run");

  if (s.memory_m && s.kind != SolverKind::kLmccd) throw ConfigError("memory", "only applies to solver lmccd");
  if (s.n_cg && s.kind != SolverKind::kRcg) throw ConfigError("ncg", "only applies to solver rcg");
  if (s.step && !is_prox_gradient(s.kind)) throw ConfigError("step", "only applies to solvers ista and fista");
  if (s.kind == SolverKind::kLmccd && (!s.memory_m || *s.memory_m < 0)) {
    throw ConfigError("memory", "lmccd needs a memory size m >= 0");
  }
  if (s.kind == SolverKind::kRcg && (!s.n_cg || *s.n_cg < 1)) {
    throw ConfigError("ncg", "rcg needs an inner iteration count >= 1");
  }
  if (s.step && !(*s.step > 0.0)) throw ConfigError("step", "must be > 0");
  if (is_prox_gradient(s.kind) && regularizer_of(c) != RegularizerKind::kIdentity) {
    throw ConfigError("solver", std::string(to_string(s.kind)) +
                                    " solves the L1 problem only and needs regularizer identity");
  }
  if (c.constraint && s.kind != SolverKind::kScdMm) throw ConfigError("constraint", "only applies to solver scd-mm");
  if (s.kind == SolverKind::kScdMm && !c.constraint) throw ConfigError("constraint", "scd-mm needs a constraint vector c");
}

void validate_problem(const ExperimentConfig& c) {
  if (!(c.alpha > 0.0) || !std::isfinite(c.alpha)) throw ConfigError("alpha", "must be a positive finite number");
  if (!(c.lambda >= 0.0) || !std::isfinite(c.lambda)) throw ConfigError("lambda", "must be a finite number >= 0");
  if (c.budget && *c.budget < 1) throw ConfigError("budget", "must be >= 1 combined A/A^T applications");
  if (c.max_iters < 0) throw ConfigError("max_iters", "must be >= 0");
  if (!(c.tol >= 0.0)) throw ConfigError("tol", "must be >= 0");

  if (c.problem == ProblemKind::kCustom) {
    if (!c.custom) throw ConfigError("a_matrix", "custom problem needs a matrix and data");
    const auto& cu = *c.custom;
    if (cu.a.rows() < 1 || cu.a.cols() < 1) throw ConfigError("a_matrix", "must be a non-empty matrix");
    if (!cu.a.allFinite()) throw ConfigError("a_matrix", "entries must be finite");
    if (cu.d.size() != cu.a.rows()) throw ConfigError("data", "length must equal the rows of a_matrix");
    if (cu.truth && cu.truth->size() != cu.a.cols()) throw ConfigError("truth", "length must equal the columns of a_matrix");
    if (cu.truth && cu.truth->norm() == 0.0) throw ConfigError("truth", "must not be identically zero");
    if (cu.regularizer == RegularizerKind::kGrad2d &&
        (cu.grid.nx < 2 || cu.grid.ny < 2 || cu.grid.size() != cu.a.cols())) {
      throw ConfigError("grid", "grad2d needs nx, ny >= 2 with nx * ny equal to the columns of a_matrix");
    }
    if (cu.regularizer == RegularizerKind::kDiff1d && cu.a.cols() < 2) {
      throw ConfigError("regularizer", "diff1d needs at least 2 unknowns");
    }
  } else {
    if (c.custom) throw ConfigError("a_matrix", "only applies to problem custom");
    switch (c.problem) {
      case ProblemKind::kDenoise2d:
      case ProblemKind::kPressure2d:
        if (c.grid.nx < 10 || c.grid.ny < 10) throw ConfigError("grid", "nx and ny must be >= 10");
        break;
      case ProblemKind::kSpikes1d:
        if (c.grid.ny != 1 || c.grid.nx < 16) throw ConfigError("grid", "spikes1d needs n >= 16 (ny = 1)");
        if (c.n_data < 0) throw ConfigError("n_data", "must be >= 1");
        break;
      case ProblemKind::kCustom: break;
    }
    if (c.problem != ProblemKind::kSpikes1d && c.grid.nx != c.grid.ny) {
      throw ConfigError("grid", std::string(to_string(c.problem)) + " needs a square grid");
    }
    if (c.problem != ProblemKind::kDenoise2d) {
      if (!(c.kernel.depth > 0.0)) throw ConfigError("kernel.depth", "must be > 0");
      if (!(c.kernel.length > 0.0)) throw ConfigError("kernel.length", "must be > 0");
    }
    if (!(c.noise.sigma_rel >= 0.0)) throw ConfigError("noise.sigma_rel", "must be >= 0");
    if (!(c.noise.mute_fraction >= 0.0)) throw ConfigError("noise.mute_fraction", "must be >= 0");
  }
  if (c.constraint) {
    const Index n = model_size(c);
    Index k = n;
    switch (regularizer_of(c)) {
      case RegularizerKind::kIdentity: k = n; break;
      case RegularizerKind::kDiff1d: k = n - 1; break;
      case RegularizerKind::kGrad2d: {
        const GridShape g = c.problem == ProblemKind::kCustom ? c.custom->grid : c.grid;
        k = 2 * g.size() - g.nx - g.ny;
        break;
      }
    }
    if (c.constraint->size() != k) {
      throw ConfigError("constraint", "length must be " + std::to_string(k) + " (rows of B)");
    }
  }
}

ProblemInstance build_problem(const ExperimentConfig& c) {
  validate_problem(c);
  ProblemInstance p;
  switch (c.problem) {
    case ProblemKind::kDenoise2d: {
      const Index n = c.grid.nx;
      p.a = identity_operator(c.grid.size());
      p.b = grad2d_aniso(c.grid.nx, c.grid.ny);
      p.truth = blocky_truth(n);
      p.model_grid = p.data_grid = c.grid;
      p.clean = *p.truth;
      break;
    }
    case ProblemKind::kSpikes1d: {
      const Index n = c.grid.nx;
      const Index m = c.n_data > 0 ? c.n_data : n;
      p.a = dilat1d_kernel(n, m, c.kernel);
      p.b = identity_operator(n);
      p.truth = spikes_truth(n);
      p.model_grid = {n, 1};
      p.data_grid = {m, 1};
      p.clean = p.a.apply(*p.truth);
      break;
    }
    case ProblemKind::kPressure2d: {
      p.a = reservoir2d_kernel(c.grid.nx, c.kernel);
      p.b = grad2d_aniso(c.grid.nx, c.grid.ny);
      p.truth = blocky_truth(c.grid.nx);
      p.model_grid = p.data_grid = c.grid;
      p.clean = p.a.apply(*p.truth);
      break;
    }
    case ProblemKind::kCustom: {
      if (!c.custom) throw ConfigError("a_matrix", "custom problem needs a matrix and data");
      const auto& cu = *c.custom;
      p.a = dense_operator(cu.a, "custom");
      p.model_grid = cu.regularizer == RegularizerKind::kGrad2d ? cu.grid : GridShape{cu.a.cols(), 1};
      p.data_grid = {cu.a.rows(), 1};
      p.b = make_regularizer(cu.regularizer, cu.a.cols(), cu.grid);
      p.truth = cu.truth;
      p.clean = cu.d;
      p.d = cu.d;
      return p;
    }
  }
  p.d = p.clean + make_noise(p.data_grid, c.noise, p.clean);
  return p;
}

SolverResult run_solver(const ProblemInstance& inst, const ExperimentConfig& c, const SolverSpec& s) {
  validate(c, s);
  SolverOptions options;
  options.max_iters = c.max_iters;
  options.tol = c.tol;
  options.budget = c.budget;
  options.truth = inst.truth;
  const AdmmProblem problem{inst.a, inst.b, inst.d, c.alpha, c.lambda};
  switch (s.kind) {
    case SolverKind::kAdmmExact: return admm_exact(problem, options);
    case SolverKind::kCcd: return ccd_solve(problem, options);
    case SolverKind::kLmccd: return lmccd_solve(problem, *s.memory_m, options);
    case SolverKind::kRcg: return rcg_solve(problem, *s.n_cg, options);
    case SolverKind::kFista: return fista_solve(inst.a, inst.d, c.alpha, s.step, options);
    case SolverKind::kIsta: return ista_solve(inst.a, inst.d, c.alpha, s.step, options);
    case SolverKind::kScdMm: return scd_mm_solve(inst.a, inst.b, inst.d, *c.constraint, c.lambda, options);
  }
  throw ConfigError("solver", "unknown solver");
}

ConditionEstimate condition_of(const ProblemInstance& inst, const ExperimentConfig& c,
                               int n_power_iters) {
  return estimate_condition(stack(inst.a, inst.b, c.alpha, c.lambda), n_power_iters);
}

}  // namespace ccd
