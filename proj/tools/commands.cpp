#include "commands.hpp"

#include "ccd/array_io.hpp"
#include "ccd/krylov.hpp"
#include "ccd/version.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <numeric>

namespace ccd::cli {

LogLevel log_level_from_env() {
  const char* raw = std::getenv("CCD_LOG_LEVEL");
  if (!raw) return LogLevel::kInfo;
  const std::string v = raw;
  if (v == "quiet") return LogLevel::kQuiet;
  if (v == "error") return LogLevel::kError;
  if (v == "warn") return LogLevel::kWarn;
  if (v == "debug") return LogLevel::kDebug;
  return LogLevel::kInfo;
}

void log(LogLevel level, const std::string& message) {
  static const LogLevel threshold = log_level_from_env();
  if (level == LogLevel::kQuiet || level > threshold) return;
  static constexpr const char* kTags[] = {"", "error", "warn", "info", "debug"};
  std::cerr << "ccd " << kTags[static_cast<int>(level)] << ": " << message << '\n';
}

namespace {

using Clock = std::chrono::steady_clock;

std::vector<std::uint64_t> dims_of(const GridShape& g) {
  if (g.is_2d()) return {static_cast<std::uint64_t>(g.ny), static_cast<std::uint64_t>(g.nx)};
  return {static_cast<std::uint64_t>(g.size())};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ArrayFormatError("cannot write " + path.string());
  out << text;
}

std::string fmt(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

Json number_or_null(double value) { return std::isfinite(value) ? Json(value) : Json(nullptr); }

// Writes truth / data (and their images); returns the data hash.
std::string write_problem_arrays(const ProblemInstance& inst, const std::filesystem::path& dir,
                                 Json& artifacts) {
  const std::string data_bytes = encode_array(dims_of(inst.data_grid), inst.d);
  write_text(dir / "data.f64", data_bytes);
  artifacts["data"] = "data.f64";
  if (inst.truth) {
    write_array(dir / "truth.f64", dims_of(inst.model_grid), *inst.truth);
    artifacts["truth"] = "truth.f64";
  }
  if (inst.data_grid.is_2d()) {
    write_pgm16(dir / "data.pgm", inst.d, inst.data_grid.ny, inst.data_grid.nx);
    artifacts["data_image"] = "data.pgm";
  }
  if (inst.truth && inst.model_grid.is_2d()) {
    write_pgm16(dir / "truth.pgm", *inst.truth, inst.model_grid.ny, inst.model_grid.nx);
    artifacts["truth_image"] = "truth.pgm";
  }
  return "fnv1a64:" + hex64(fnv1a64(data_bytes));
}

Json result_json(const SolverSpec& spec, const SolverResult& r) {
  Json j;
  j["solver"] = spec.label();
  j["iterations"] = r.state.iteration;
  j["stop"] = std::string(to_string(r.stop));
  j["ops_A"] = r.ops.a;
  j["ops_At"] = r.ops.at;
  j["ops_B"] = r.ops.b;
  j["ops_Bt"] = r.ops.bt;
  if (!r.record.empty()) {
    const ConvergenceRow& last = r.record.back();
    j["objective"] = number_or_null(last.objective);
    j["primal_residual"] = number_or_null(last.primal_residual);
    j["rel_change"] = number_or_null(last.rel_change);
    j["rel_error"] = number_or_null(last.rel_error);
  }
  if (r.step > 0.0) j["step"] = r.step;
  return j;
}

bool failed_numerically(const SolverResult& r) {
  return r.stop == StopReason::kDiverged || !r.state.u.allFinite();
}

void write_manifest(const std::filesystem::path& dir, Json manifest) {
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

// Shared front half of run and compare: load, build, prepare the output directory.
struct Prepared {
  Experiment experiment;
  ProblemInstance instance;
};

int prepare(const CommandOptions& opt, Mode mode, Prepared& out) {
  try {
    out.experiment = load_experiment(opt.config, opt.overrides, mode);
    out.instance = build_problem(out.experiment.config);
  } catch (const ConfigError& e) {
    log(LogLevel::kError, std::string("invalid config: ") + e.what());
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    log(LogLevel::kError, std::string("invalid config: ") + e.what());
    return kExitConfig;
  }
  std::error_code ec;
  std::filesystem::create_directories(opt.out_dir, ec);
  if (ec) {
    log(LogLevel::kError, "cannot create " + opt.out_dir.string() + ": " + ec.message());
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace

int run_command(const CommandOptions& opt) {
  const auto t0 = Clock::now();
  Prepared prep;
  if (int code = prepare(opt, Mode::kRun, prep); code != kExitOk) return code;
  const Experiment& ex = prep.experiment;
  const ProblemInstance& inst = prep.instance;
  const SolverSpec& spec = ex.solvers.front();

  try {
    Json artifacts;
    const std::string data_hash = write_problem_arrays(inst, opt.out_dir, artifacts);
    log(LogLevel::kInfo, "running " + spec.label() + " on " + std::string(to_string(ex.config.problem)));

    SolverResult result;
    try {
      result = run_solver(inst, ex.config, spec);
    } catch (const RankDeficientError& e) {
      log(LogLevel::kError, std::string("numerical failure: ") + e.what());
      return kExitNumeric;
    }

    write_text(opt.out_dir / "convergence.csv", convergence_csv(result.record));
    artifacts["convergence"] = "convergence.csv";
    write_array(opt.out_dir / "model.f64", dims_of(inst.model_grid), result.state.u);
    artifacts["model"] = "model.f64";
    if (inst.model_grid.is_2d()) {
      write_pgm16(opt.out_dir / "model.pgm", result.state.u, inst.model_grid.ny, inst.model_grid.nx);
      artifacts["model_image"] = "model.pgm";
    }

    Json manifest;
    manifest["tool"] = "ccd";
    manifest["version"] = kVersion;
    manifest["command"] = "run";
    manifest["config"] = to_json(ex, Mode::kRun);
    manifest["seed"] = ex.config.noise.seed;
    manifest["data_hash"] = data_hash;
    manifest["artifacts"] = artifacts;
    manifest["result"] = result_json(spec, result);
    manifest["wall_time_seconds"] = std::chrono::duration<double>(Clock::now() - t0).count();
    write_manifest(opt.out_dir, manifest);

    const double err = result.record.empty() ? std::nan("") : result.record.back().rel_error;
    log(LogLevel::kInfo, spec.label() + ": " + std::to_string(result.state.iteration) +
                             " iterations, stop=" + std::string(to_string(result.stop)) +
                             ", rel_error=" + fmt(err));
    if (failed_numerically(result)) {
      log(LogLevel::kError, "numerical failure: " + spec.label() + " diverged");
      return kExitNumeric;
    }
  } catch (const ArrayFormatError& e) {
    log(LogLevel::kError, e.what());
    return kExitIo;
  }
  return kExitOk;
}

int compare_command(const CommandOptions& opt) {
  const auto t0 = Clock::now();
  Prepared prep;
  if (int code = prepare(opt, Mode::kCompare, prep); code != kExitOk) return code;
  const Experiment& ex = prep.experiment;
  const ProblemInstance& inst = prep.instance;

  struct Outcome {
    SolverResult result;
    std::string error;
  };

  try {
    Json artifacts;
    const std::string data_hash = write_problem_arrays(inst, opt.out_dir, artifacts);

    // Independent runs on the shared, read-only instance; each owns its counters.
    std::vector<std::future<Outcome>> futures;
    for (const auto& spec : ex.solvers) {
      futures.push_back(std::async(std::launch::async, [&inst, &ex, spec] {
        Outcome o;
        try {
          o.result = run_solver(inst, ex.config, spec);
        } catch (const RankDeficientError& e) {
          o.error = e.what();
        }
        return o;
      }));
    }
    std::vector<Outcome> outcomes;
    for (auto& f : futures) outcomes.push_back(f.get());

    bool numeric_failure = false;
    Json results = Json::array();
    Json per_solver = Json::object();
    for (std::size_t i = 0; i < ex.solvers.size(); ++i) {
      const SolverSpec& spec = ex.solvers[i];
      const Outcome& o = outcomes[i];
      if (!o.error.empty()) {
        log(LogLevel::kError, spec.label() + ": numerical failure: " + o.error);
        numeric_failure = true;
        results.push_back({{"solver", spec.label()}, {"error", o.error}});
        continue;
      }
      const std::string csv = "convergence_" + spec.label() + ".csv";
      const std::string model = "model_" + spec.label() + ".f64";
      write_text(opt.out_dir / csv, convergence_csv(o.result.record));
      write_array(opt.out_dir / model, dims_of(inst.model_grid), o.result.state.u);
      per_solver[spec.label()] = {{"convergence", csv}, {"model", model}};
      results.push_back(result_json(spec, o.result));
      if (failed_numerically(o.result)) {
        log(LogLevel::kError, spec.label() + ": numerical failure (diverged)");
        numeric_failure = true;
      }
    }
    artifacts["solvers"] = per_solver;

    // Summary ranked by final relative error; NaN (no truth, or failure) sorts last.
    std::vector<std::size_t> order(ex.solvers.size());
    std::iota(order.begin(), order.end(), 0);
    auto final_error = [&](std::size_t i) {
      const auto& rec = outcomes[i].result.record;
      return outcomes[i].error.empty() && !rec.empty() ? rec.back().rel_error : std::nan("");
    };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double ea = final_error(a);
      const double eb = final_error(b);
      if (std::isnan(eb)) return !std::isnan(ea);
      if (std::isnan(ea)) return false;
      return ea < eb;
    });
    std::string summary = "rank,solver,rel_error,objective,iterations,ops_A,ops_At,stop,data_hash\n";
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
      const std::size_t i = order[rank];
      const SolverResult& r = outcomes[i].result;
      const double objective = r.record.empty() ? std::nan("") : r.record.back().objective;
      const std::string stop = outcomes[i].error.empty() ? std::string(to_string(r.stop)) : "error";
      summary += std::to_string(rank + 1) + "," + ex.solvers[i].label() + "," + fmt(final_error(i)) + "," +
                 fmt(objective) + "," + std::to_string(r.state.iteration) + "," + std::to_string(r.ops.a) +
                 "," + std::to_string(r.ops.at) + "," + stop + "," + data_hash + "\n";
    }
    write_text(opt.out_dir / "summary.csv", summary);
    artifacts["summary"] = "summary.csv";
    std::cout << summary;

    Json manifest;
    manifest["tool"] = "ccd";
    manifest["version"] = kVersion;
    manifest["command"] = "compare";
    manifest["config"] = to_json(ex, Mode::kCompare);
    manifest["seed"] = ex.config.noise.seed;
    manifest["data_hash"] = data_hash;
    manifest["artifacts"] = artifacts;
    manifest["results"] = results;
    manifest["wall_time_seconds"] = std::chrono::duration<double>(Clock::now() - t0).count();
    write_manifest(opt.out_dir, manifest);
    if (numeric_failure) return kExitNumeric;
  } catch (const ArrayFormatError& e) {
    log(LogLevel::kError, e.what());
    return kExitIo;
  }
  return kExitOk;
}

int condition_command(const CommandOptions& opt, std::ostream& out) {
  Experiment ex;
  ProblemInstance inst;
  try {
    ex = load_experiment(opt.config, opt.overrides, Mode::kCondition);
    inst = build_problem(ex.config);
  } catch (const std::invalid_argument& e) {
    log(LogLevel::kError, std::string("invalid config: ") + e.what());
    return kExitConfig;
  }
  const ConditionEstimate est = condition_of(inst, ex.config, ex.power_iters);
  out << "kappa " << fmt(est.normal()) << '\n'
      << "operator_ratio " << fmt(est.operator_ratio()) << '\n'
      << "lambda_max " << fmt(est.lambda_max) << '\n'
      << "lambda_min " << fmt(est.lambda_min) << '\n'
      << "method " << (inst.a.n_in() <= kDenseConditionLimit ? "dense" : "iterative") << '\n';
  return kExitOk;
}

}  // namespace ccd::cli
