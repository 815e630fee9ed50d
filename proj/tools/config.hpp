#pragma once

#include "ccd/experiment.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ccd::cli {

using Json = nlohmann::json;

/// Command-line values that replace config fields.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> budget;
  std::optional<std::string> solver;
  std::optional<double> lambda;
  std::optional<double> alpha;
  std::optional<int> memory;
  std::optional<int> ncg;
};

/// A fully resolved experiment: the problem plus one or more solvers.
struct Experiment {
  ExperimentConfig config;
  std::vector<SolverSpec> solvers;
  int power_iters = 200;
};

enum class Mode { kRun, kCompare, kCondition };

/// Reads a JSON config, merges the named preset (if any) underneath it and
/// applies overrides. Relative file paths resolve against `base_dir`.
/// Throws ConfigError naming the offending field.
Experiment resolve(const Json& document, const Overrides& overrides, Mode mode,
                   const std::filesystem::path& base_dir);

Experiment load_experiment(const std::filesystem::path& path, const Overrides& overrides, Mode mode);

/// Complete, preset-free JSON that resolves back to the same experiment.
Json to_json(const Experiment& experiment, Mode mode);

Json solver_to_json(const SolverSpec& solver);

}  // namespace ccd::cli
