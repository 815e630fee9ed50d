#include "ccd/solvers.hpp"

#include "ccd/krylov.hpp"
#include "ccd/op_counter.hpp"
#include "ccd/operators.hpp"
#include "ccd/proximal.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <utility>

namespace ccd {

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::kMaxIterations: return "max_iterations";
    case StopReason::kConverged: return "converged";
    case StopReason::kBudget: return "budget";
    case StopReason::kDiverged: return "diverged";
  }
  return "unknown";
}

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr int kRisingObjectiveLimit = 10;

double relative_change(const Vector& next, const Vector& prev) {
  const double diff = (next - prev).norm();
  const double base = prev.norm();
  return base > 0.0 ? diff / base : diff;
}

void check_problem(const AdmmProblem& p) {
  if (p.a_op.n_in() != p.b_op.n_in()) {
    throw_dimension_error("problem: B domain must match A domain", p.a_op.n_in(), p.b_op.n_in());
  }
  if (p.d.size() != p.a_op.n_out()) throw_dimension_error("problem: data", p.a_op.n_out(), p.d.size());
  if (!(p.alpha > 0.0)) throw ParameterError("problem: alpha must be > 0");
  if (!(p.lambda > 0.0)) throw ParameterError("problem: lambda must be > 0");
}

void check_options(const SolverOptions& o, Index n) {
  if (o.max_iters < 0) throw ParameterError("solver: max_iters must be >= 0");
  if (o.tol < 0.0) throw ParameterError("solver: tol must be >= 0");
  if (o.budget && *o.budget < 1) throw ParameterError("solver: budget must be >= 1");
  if (o.truth) {
    if (o.truth->size() != n) throw_dimension_error("solver: truth", n, o.truth->size());
    if (o.truth->norm() == 0.0) throw ParameterError("solver: truth model is identically zero");
  }
}

OpCounts snapshot(const OpCounter& c) {
  return {c.n_apply_a(), c.n_apply_at(), c.n_apply_b(), c.n_apply_bt()};
}

// Counted copies of the problem operators; diagnostics keep using the originals.
struct Instrumented {
  std::shared_ptr<OpCounter> counter;
  LinearOperator a;
  LinearOperator b;

  Instrumented(const LinearOperator& a_op, const LinearOperator& b_op,
               std::optional<std::int64_t> budget)
      : counter(std::make_shared<OpCounter>(budget)),
        a(count_data_operator(a_op, counter)),
        b(count_regularizer(b_op, counter)) {}
};

class Recorder {
 public:
  Recorder(const Objective& objective, const SolverOptions& options, const OpCounter& counter)
      : objective_(objective), options_(options), counter_(counter) {}

  void add(const SolverState& state, double rel_change, double primal_residual,
           ConvergenceRecord& record) const {
    ConvergenceRow row;
    row.iteration = state.iteration;
    row.ops_a = counter_.n_apply_a();
    row.ops_at = counter_.n_apply_at();
    row.objective = objective_.value(state.u);
    row.primal_residual = primal_residual;
    row.rel_change = rel_change;
    row.rel_error = options_.truth
                        ? (state.u - *options_.truth).norm() / options_.truth->norm()
                        : kNan;
    record.rows.push_back(row);
  }

 private:
  const Objective& objective_;
  const SolverOptions& options_;
  const OpCounter& counter_;
};

SolverState zero_state(Index n, Index k) {
  return {Vector::Zero(n), Vector::Zero(k), Vector::Zero(k), 0};
}

// Shared outer ADMM loop. `u_step(state)` returns u_{k+1}; `after_update(state)`
// runs once z_{k+1} and b_{k+1} are in place. `iteration_cost` is the number of
// combined A/A^T applications one outer iteration may spend.
template <class UStep, class AfterUpdate>
void run_admm_loop(const AdmmProblem& problem, Instrumented& inst, const SolverOptions& options,
                   std::int64_t iteration_cost, UStep&& u_step, AfterUpdate&& after_update,
                   SolverResult& result) {
  const Objective objective(problem.a_op, problem.b_op, problem.d, problem.alpha);
  const Recorder recorder(objective, options, *inst.counter);
  const double threshold = 1.0 / problem.lambda;
  SolverState& st = result.state;

  result.stop = StopReason::kMaxIterations;
  while (st.iteration < options.max_iters) {
    if (!inst.counter->affords(iteration_cost)) {
      result.stop = StopReason::kBudget;
      break;
    }
    Vector u_next = u_step(st);
    const Vector bu = inst.b.apply(u_next);
    st.z = shrink(bu - st.b, threshold);
    st.b += st.z - bu;
    const double primal = (st.z - bu).norm();
    const double change = relative_change(u_next, st.u);
    st.u = std::move(u_next);
    ++st.iteration;
    after_update(st);

    recorder.add(st, change, primal, result.record);
    if (options.on_iterate) options.on_iterate(st);
    if (change <= options.tol) {
      result.stop = StopReason::kConverged;
      break;
    }
  }
  result.ops = snapshot(*inst.counter);
}

template <class Store>
SolverResult run_compressive(const AdmmProblem& problem, const SolverOptions& options,
                             const std::function<Store(const StackedOperator&)>& make_store) {
  check_problem(problem);
  check_options(options, problem.a_op.n_in());
  Instrumented inst(problem.a_op, problem.b_op, options.budget);
  const StackedOperator f = stack(inst.a, inst.b, problem.alpha, problem.lambda);

  SolverResult result;
  result.state = zero_state(f.n_in(), f.n_bottom());
  if (!inst.counter->affords(2)) {
    result.stop = StopReason::kBudget;
    return result;
  }
  Store store = make_store(f);
  Vector v = f.stack_rhs(problem.d, result.state.z + result.state.b);
  store.start(v);

  run_admm_loop(
      problem, inst, options, 2, [&](const SolverState&) { return store.project(v); },
      [&](const SolverState& st) {
        v = f.stack_rhs(problem.d, st.z + st.b);
        store.extend(v);
      },
      result);
  return result;
}

}  // namespace

SolverResult admm_exact(const AdmmProblem& problem, const SolverOptions& options) {
  check_problem(problem);
  check_options(options, problem.a_op.n_in());
  Instrumented inst(problem.a_op, problem.b_op, options.budget);
  const StackedOperator f = stack(inst.a, inst.b, problem.alpha, problem.lambda);

  SolverResult result;
  result.state = zero_state(f.n_in(), f.n_bottom());
  if (!inst.counter->affords(f.n_in())) {
    result.stop = StopReason::kBudget;
    return result;
  }
  const NormalEquations normal(f);
  run_admm_loop(
      problem, inst, options, 0,
      [&](const SolverState& st) {
        return normal.solve(f.stack_rhs(problem.d, st.z + st.b));
      },
      [](const SolverState&) {}, result);
  return result;
}

SolverResult ccd_solve(const AdmmProblem& problem, const SolverOptions& options) {
  return run_compressive<DirectionSet>(
      problem, options, [](const StackedOperator& f) { return DirectionSet(f); });
}

SolverResult lmccd_solve(const AdmmProblem& problem, int memory_m, const SolverOptions& options) {
  if (memory_m < 0) throw ParameterError("lmccd: memory m must be >= 0");
  return run_compressive<DirectionRing>(
      problem, options, [memory_m](const StackedOperator& f) { return DirectionRing(f, memory_m); });
}

SolverResult rcg_solve(const AdmmProblem& problem, int n_cg, const SolverOptions& options) {
  if (n_cg < 1) throw ParameterError("rcg: n_cg must be >= 1");
  check_problem(problem);
  check_options(options, problem.a_op.n_in());
  Instrumented inst(problem.a_op, problem.b_op, options.budget);
  const StackedOperator f = stack(inst.a, inst.b, problem.alpha, problem.lambda);

  SolverResult result;
  result.state = zero_state(f.n_in(), f.n_bottom());
  run_admm_loop(
      problem, inst, options, 2 * static_cast<std::int64_t>(n_cg) + 1,
      [&](const SolverState& st) {
        CgneResult inner = cgne(f, f.stack_rhs(problem.d, st.z + st.b), st.u, n_cg);
        result.inner_iterations.push_back(inner.iterations);
        return std::move(inner.x);
      },
      [](const SolverState&) {}, result);
  return result;
}

ScdResult scd_solve(const StackedOperator& f_op, const RhsProvider& rhs, const ScdOptions& options) {
  if (options.max_iters < 0) throw ParameterError("scd: max_iters must be >= 0");
  auto counter = std::make_shared<OpCounter>();
  const StackedOperator f = stack(count_data_operator(f_op.a_op(), counter),
                                  count_regularizer(f_op.b_op(), counter), f_op.alpha(),
                                  f_op.lambda());
  ScdResult result;
  result.u = Vector::Zero(f.n_in());
  Vector v = rhs(0, result.u);
  DirectionSet store(f);
  store.start(v);

  for (int k = 0; k < options.max_iters; ++k) {
    Vector u_next = store.project(v);
    const double misfit = 0.5 * (f_op.apply(u_next) - v).squaredNorm();
    Vector v_next = rhs(k + 1, u_next);
    store.extend(v_next);
    if (options.on_iteration) options.on_iteration(k, u_next, store);

    const double change = relative_change(u_next, result.u);
    result.u = std::move(u_next);
    v = std::move(v_next);
    result.record.rows.push_back(
        {k + 1, counter->n_apply_a(), counter->n_apply_at(), misfit, kNan, change, kNan});
    if (change <= options.tol) {
      result.stop = StopReason::kConverged;
      break;
    }
  }
  result.ops = snapshot(*counter);
  return result;
}

SolverResult scd_mm_solve(const LinearOperator& a_op, const LinearOperator& b_op, const Vector& d,
                          const Vector& c, double lambda, const SolverOptions& options) {
  if (a_op.n_in() != b_op.n_in()) {
    throw_dimension_error("scd_mm: B domain must match A domain", a_op.n_in(), b_op.n_in());
  }
  if (d.size() != a_op.n_out()) throw_dimension_error("scd_mm: data", a_op.n_out(), d.size());
  if (c.size() != b_op.n_out()) throw_dimension_error("scd_mm: constraint", b_op.n_out(), c.size());
  if (!(lambda > 0.0)) throw ParameterError("scd_mm: lambda must be > 0");
  check_options(options, a_op.n_in());

  Instrumented inst(a_op, b_op, options.budget);
  const StackedOperator f = stack(inst.a, inst.b, 1.0, lambda);

  SolverResult result;
  result.state = {Vector::Zero(f.n_in()), c, Vector::Zero(f.n_bottom()), 0};
  SolverState& st = result.state;
  if (!inst.counter->affords(2)) {
    result.stop = StopReason::kBudget;
    return result;
  }

  Vector v = f.stack_rhs(d, c + st.b);
  DirectionSet store(f);
  store.start(v);

  result.stop = StopReason::kMaxIterations;
  while (st.iteration < options.max_iters) {
    if (!inst.counter->affords(2)) {
      result.stop = StopReason::kBudget;
      break;
    }
    Vector u_next = store.project(v);
    const Vector bu = inst.b.apply(u_next);
    st.b += c - bu;
    v = f.stack_rhs(d, c + st.b);
    store.extend(v);

    const double change = relative_change(u_next, st.u);
    st.u = std::move(u_next);
    ++st.iteration;

    ConvergenceRow row;
    row.iteration = st.iteration;
    row.ops_a = inst.counter->n_apply_a();
    row.ops_at = inst.counter->n_apply_at();
    row.objective = (a_op.apply(st.u) - d).squaredNorm();
    row.primal_residual = (bu - c).norm();
    row.rel_change = change;
    row.rel_error = options.truth ? (st.u - *options.truth).norm() / options.truth->norm() : kNan;
    result.record.rows.push_back(row);
    if (options.on_iterate) options.on_iterate(st);
    if (change <= options.tol) {
      result.stop = StopReason::kConverged;
      break;
    }
  }
  result.ops = snapshot(*inst.counter);
  return result;
}

double default_prox_step(const LinearOperator& a_op, double alpha) {
  if (!(alpha > 0.0)) throw ParameterError("prox step: alpha must be > 0");
  const double sigma2 = largest_gram_eigenvalue(a_op, 100);
  if (!(sigma2 > 0.0)) throw ParameterError("prox step: operator A is zero");
  return 0.95 / (alpha * sigma2);
}

double fista_next_zeta(double zeta) { return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * zeta * zeta)); }

namespace {

// Shared driver for ISTA (accelerate = false) and FISTA.
SolverResult run_prox_gradient(const LinearOperator& a_op, const Vector& d, double alpha,
                               std::optional<double> step, const SolverOptions& options,
                               bool accelerate) {
  if (d.size() != a_op.n_out()) throw_dimension_error("prox gradient: data", a_op.n_out(), d.size());
  if (!(alpha > 0.0)) throw ParameterError("prox gradient: alpha must be > 0");
  check_options(options, a_op.n_in());
  const double gamma = step ? *step : default_prox_step(a_op, alpha);
  if (!(gamma > 0.0)) throw ParameterError("prox gradient: step must be > 0");

  const LinearOperator identity = identity_operator(a_op.n_in());
  Instrumented inst(a_op, identity, options.budget);
  const Objective objective(a_op, identity, d, alpha);
  const Recorder recorder(objective, options, *inst.counter);

  SolverResult result;
  result.step = gamma;
  const Index n = a_op.n_in();
  SolverState& st = result.state;
  st = {Vector::Zero(n), Vector::Zero(n), Vector(), 0};
  Vector point = Vector::Zero(n);  // where the gradient is taken
  double zeta = 1.0;
  double previous_objective = objective.value(st.u);
  int rising = 0;

  result.stop = StopReason::kMaxIterations;
  while (st.iteration < options.max_iters) {
    if (!inst.counter->affords(2)) {
      result.stop = StopReason::kBudget;
      break;
    }
    const Vector gradient = inst.a.apply_adjoint(inst.a.apply(point) - d);
    Vector thresholded = shrink(point - gamma * alpha * gradient, gamma);
    if (accelerate) {
      const double zeta_next = fista_next_zeta(zeta);
      point = thresholded + ((zeta - 1.0) / zeta_next) * (thresholded - st.u);
      zeta = zeta_next;
    } else {
      point = thresholded;
    }
    const double change = relative_change(thresholded, st.u);
    st.u = std::move(thresholded);
    st.z = st.u;
    ++st.iteration;

    recorder.add(st, change, 0.0, result.record);
    if (options.on_iterate) options.on_iterate(st);

    const double current = result.record.back().objective;
    rising = current > previous_objective ? rising + 1 : 0;
    previous_objective = current;
    if (rising >= kRisingObjectiveLimit || !std::isfinite(current)) {
      result.stop = StopReason::kDiverged;
      break;
    }
    if (change <= options.tol) {
      result.stop = StopReason::kConverged;
      break;
    }
  }
  result.ops = snapshot(*inst.counter);
  return result;
}

}  // namespace

SolverResult ista_solve(const LinearOperator& a_op, const Vector& d, double alpha,
                        std::optional<double> step, const SolverOptions& options) {
  return run_prox_gradient(a_op, d, alpha, step, options, false);
}

SolverResult fista_solve(const LinearOperator& a_op, const Vector& d, double alpha,
                         std::optional<double> step, const SolverOptions& options) {
  return run_prox_gradient(a_op, d, alpha, step, options, true);
}

}  // namespace ccd
