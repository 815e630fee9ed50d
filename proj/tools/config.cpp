#include "config.hpp"

#include "ccd/array_io.hpp"

#include <fstream>
#include <set>

namespace ccd::cli {

namespace {

const std::set<std::string> kTopLevelKeys = {
    "preset", "problem", "solver", "memory",   "ncg",    "step",   "alpha",
    "lambda", "budget",  "max_iters", "tol",   "seed",   "noise",  "grid",
    "n",      "n_data",  "kernel", "a_matrix", "data",   "truth",  "regularizer",
    "constraint", "solvers", "power_iters"};

void reject_unknown(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(where + key, "unknown field");
  }
}

double get_double(const Json& j, const std::string& field) {
  if (!j.is_number()) throw ConfigError(field, "must be a number");
  return j.get<double>();
}

std::int64_t get_int(const Json& j, const std::string& field) {
  if (!j.is_number_integer()) throw ConfigError(field, "must be an integer");
  return j.get<std::int64_t>();
}

std::string get_string(const Json& j, const std::string& field) {
  if (!j.is_string()) throw ConfigError(field, "must be a string");
  return j.get<std::string>();
}

Array read_array_field(const Json& j, const std::string& field, const std::filesystem::path& base) {
  std::filesystem::path path = get_string(j, field);
  if (path.is_relative()) path = base / path;
  try {
    return read_array(path);
  } catch (const ArrayFormatError& e) {
    throw ConfigError(field, e.what());
  }
}

Vector get_vector(const Json& j, const std::string& field, const std::filesystem::path& base) {
  if (j.is_string()) return read_array_field(j, field, base).values;
  if (!j.is_array() || j.empty()) throw ConfigError(field, "must be a non-empty array of numbers or an array file path");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Index>(i)] = get_double(j[i], field + "[" + std::to_string(i) + "]");
  }
  return v;
}

Matrix get_matrix(const Json& j, const std::string& field, const std::filesystem::path& base) {
  if (j.is_string()) {
    Array arr = read_array_field(j, field, base);
    if (arr.dims.size() != 2) throw ConfigError(field, "array file must have rank 2");
    const auto rows = static_cast<Index>(arr.dims[0]);
    const auto cols = static_cast<Index>(arr.dims[1]);
    Matrix m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
      for (Index c = 0; c < cols; ++c) m(r, c) = arr.values[r * cols + c];
    }
    return m;
  }
  if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty()) {
    throw ConfigError(field, "must be an array of rows or an array file path");
  }
  const auto rows = static_cast<Index>(j.size());
  const auto cols = static_cast<Index>(j[0].size());
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw ConfigError(field, "rows must all have the same length");
    }
    for (Index c = 0; c < cols; ++c) {
      m(r, c) = get_double(row[static_cast<std::size_t>(c)], field);
    }
  }
  return m;
}

SolverKind get_solver_kind(const std::string& name, const std::string& field) {
  auto kind = parse_solver_kind(name);
  if (!kind) {
    throw ConfigError(field, "unknown solver '" + name +
                                 "' (admm-exact, ccd, lmccd, rcg, fista, ista, scd-mm)");
  }
  return *kind;
}

void read_solver_knobs(const Json& obj, SolverSpec& spec, const std::string& where) {
  if (obj.contains("memory")) spec.memory_m = static_cast<int>(get_int(obj["memory"], where + "memory"));
  if (obj.contains("ncg")) spec.n_cg = static_cast<int>(get_int(obj["ncg"], where + "ncg"));
  if (obj.contains("step")) spec.step = get_double(obj["step"], where + "step");
}

GridShape read_grid(const Json& doc, ProblemKind problem, GridShape fallback) {
  GridShape g = fallback;
  if (doc.contains("n")) {
    const Index n = get_int(doc["n"], "n");
    g = problem == ProblemKind::kSpikes1d ? GridShape{n, 1} : GridShape{n, n};
  }
  if (doc.contains("grid")) {
    const Json& grid = doc["grid"];
    if (!grid.is_object()) throw ConfigError("grid", "must be an object {nx, ny}");
    reject_unknown(grid, {"nx", "ny"}, "grid.");
    if (grid.contains("nx")) g.nx = get_int(grid["nx"], "grid.nx");
    if (grid.contains("ny")) g.ny = get_int(grid["ny"], "grid.ny");
  }
  return g;
}

// Fills the solver's own knob from the preset only when the preset's default
// solver is the one being run.
void inherit_knobs(SolverSpec& spec, const std::optional<Preset>& preset) {
  if (!preset || preset->solver.kind != spec.kind) return;
  if (spec.kind == SolverKind::kLmccd && !spec.memory_m) spec.memory_m = preset->solver.memory_m;
  if (spec.kind == SolverKind::kRcg && !spec.n_cg) spec.n_cg = preset->solver.n_cg;
}

}  // namespace

Experiment resolve(const Json& doc, const Overrides& ov, Mode mode, const std::filesystem::path& base) {
  if (!doc.is_object()) throw ConfigError("config", "top level must be a JSON object");
  reject_unknown(doc, kTopLevelKeys, "");

  std::optional<Preset> preset;
  if (doc.contains("preset")) {
    const std::string name = get_string(doc["preset"], "preset");
    preset = find_preset(name);
    if (!preset) throw ConfigError("preset", "unknown preset '" + name + "' (denoise, spikes, pressure)");
  }

  Experiment ex;
  if (preset) ex.config = preset->config;
  if (doc.contains("problem")) {
    const std::string name = get_string(doc["problem"], "problem");
    auto kind = parse_problem_kind(name);
    if (!kind) throw ConfigError("problem", "unknown problem '" + name + "' (denoise2d, spikes1d, pressure2d, custom)");
    if (preset && *kind != preset->config.problem) throw ConfigError("problem", "conflicts with the preset");
    ex.config.problem = *kind;
  } else if (!preset) {
    throw ConfigError("problem", "required when no preset is given");
  }
  ExperimentConfig& c = ex.config;

  if (doc.contains("alpha")) c.alpha = get_double(doc["alpha"], "alpha");
  if (doc.contains("lambda")) c.lambda = get_double(doc["lambda"], "lambda");
  if (doc.contains("budget")) {
    if (doc["budget"].is_null()) {
      c.budget.reset();
    } else {
      c.budget = get_int(doc["budget"], "budget");
    }
  }
  if (doc.contains("max_iters")) c.max_iters = static_cast<int>(get_int(doc["max_iters"], "max_iters"));
  if (doc.contains("tol")) c.tol = get_double(doc["tol"], "tol");
  if (doc.contains("seed")) {
    const auto seed = get_int(doc["seed"], "seed");
    if (seed < 0) throw ConfigError("seed", "must be >= 0");
    c.noise.seed = static_cast<std::uint64_t>(seed);
  }
  if (doc.contains("power_iters")) ex.power_iters = static_cast<int>(get_int(doc["power_iters"], "power_iters"));

  const bool custom = c.problem == ProblemKind::kCustom;
  if (custom) {
    for (const char* key : {"noise", "kernel", "n_data", "n"}) {
      if (doc.contains(key)) throw ConfigError(key, "does not apply to problem custom");
    }
    CustomProblem cu;
    if (!doc.contains("a_matrix")) throw ConfigError("a_matrix", "required for problem custom");
    if (!doc.contains("data")) throw ConfigError("data", "required for problem custom");
    cu.a = get_matrix(doc["a_matrix"], "a_matrix", base);
    cu.d = get_vector(doc["data"], "data", base);
    if (doc.contains("truth")) cu.truth = get_vector(doc["truth"], "truth", base);
    if (doc.contains("regularizer")) {
      const std::string name = get_string(doc["regularizer"], "regularizer");
      auto kind = parse_regularizer_kind(name);
      if (!kind) throw ConfigError("regularizer", "unknown regularizer '" + name + "' (identity, diff1d, grad2d)");
      cu.regularizer = *kind;
    }
    cu.grid = read_grid(doc, c.problem, {cu.a.cols(), 1});
    c.custom = std::move(cu);
  } else {
    for (const char* key : {"a_matrix", "data", "truth", "regularizer"}) {
      if (doc.contains(key)) throw ConfigError(key, "only applies to problem custom");
    }
    c.grid = read_grid(doc, c.problem, c.grid);
    if (doc.contains("n_data")) {
      if (c.problem != ProblemKind::kSpikes1d) throw ConfigError("n_data", "only applies to problem spikes1d");
      c.n_data = get_int(doc["n_data"], "n_data");
      if (c.n_data < 1) throw ConfigError("n_data", "must be >= 1");
    }
    if (doc.contains("noise")) {
      const Json& noise = doc["noise"];
      if (!noise.is_object()) throw ConfigError("noise", "must be an object");
      reject_unknown(noise, {"sigma_rel", "mute_fraction"}, "noise.");
      if (noise.contains("sigma_rel")) c.noise.sigma_rel = get_double(noise["sigma_rel"], "noise.sigma_rel");
      if (noise.contains("mute_fraction")) {
        c.noise.mute_fraction = get_double(noise["mute_fraction"], "noise.mute_fraction");
      }
    }
    if (doc.contains("kernel")) {
      if (c.problem == ProblemKind::kDenoise2d) throw ConfigError("kernel", "does not apply to problem denoise2d");
      const Json& k = doc["kernel"];
      if (!k.is_object()) throw ConfigError("kernel", "must be an object");
      reject_unknown(k, {"depth", "length", "scale"}, "kernel.");
      if (k.contains("depth")) c.kernel.depth = get_double(k["depth"], "kernel.depth");
      if (k.contains("length")) c.kernel.length = get_double(k["length"], "kernel.length");
      if (k.contains("scale")) c.kernel.scale = get_double(k["scale"], "kernel.scale");
    }
    if (c.problem == ProblemKind::kSpikes1d && c.n_data == 0) c.n_data = c.grid.nx;
  }
  if (doc.contains("constraint")) {
    const Json& cj = doc["constraint"];
    if (cj.is_string() && cj.get<std::string>() == "zero") {
      Index k = 0;
      const GridShape g = custom ? c.custom->grid : c.grid;
      const Index n = custom ? c.custom->a.cols() : c.grid.size();
      const RegularizerKind reg = custom ? c.custom->regularizer
                                  : c.problem == ProblemKind::kSpikes1d ? RegularizerKind::kIdentity
                                                                        : RegularizerKind::kGrad2d;
      switch (reg) {
        case RegularizerKind::kIdentity: k = n; break;
        case RegularizerKind::kDiff1d: k = n - 1; break;
        case RegularizerKind::kGrad2d: k = 2 * g.size() - g.nx - g.ny; break;
      }
      if (k < 1) throw ConfigError("constraint", "regularizer has no rows");
      c.constraint = Vector::Zero(k);
    } else {
      c.constraint = get_vector(cj, "constraint", base);
    }
  }

  if (ov.alpha) c.alpha = *ov.alpha;
  if (ov.lambda) c.lambda = *ov.lambda;
  if (ov.budget) c.budget = *ov.budget;
  if (ov.seed) c.noise.seed = *ov.seed;

  switch (mode) {
    case Mode::kRun: {
      if (doc.contains("solvers")) throw ConfigError("solvers", "a solver list is for the compare command");
      SolverSpec spec;
      if (ov.solver) {
        spec.kind = get_solver_kind(*ov.solver, "--solver");
      } else if (doc.contains("solver")) {
        spec.kind = get_solver_kind(get_string(doc["solver"], "solver"), "solver");
      } else if (preset) {
        spec.kind = preset->solver.kind;
      } else {
        throw ConfigError("solver", "required when no preset is given");
      }
      read_solver_knobs(doc, spec, "");
      if (ov.memory) spec.memory_m = *ov.memory;
      if (ov.ncg) spec.n_cg = *ov.ncg;
      inherit_knobs(spec, preset);
      validate(c, spec);
      ex.solvers.push_back(spec);
      break;
    }
    case Mode::kCompare: {
      for (const char* key : {"solver", "memory", "ncg", "step"}) {
        if (doc.contains(key)) throw ConfigError(key, "compare takes solver settings inside the solvers list");
      }
      if (ov.solver || ov.memory || ov.ncg) {
        throw ConfigError("--solver/--memory/--ncg", "do not apply to compare; edit the solvers list");
      }
      if (!doc.contains("solvers") || !doc["solvers"].is_array()) {
        throw ConfigError("solvers", "compare needs a list of solver entries");
      }
      const Json& list = doc["solvers"];
      if (list.size() < 2) throw ConfigError("solvers", "compare needs at least 2 entries");
      std::set<std::string> labels;
      for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string where = "solvers[" + std::to_string(i) + "].";
        const Json& entry = list[i];
        if (!entry.is_object()) throw ConfigError(where, "must be an object");
        reject_unknown(entry, {"solver", "memory", "ncg", "step"}, where);
        if (!entry.contains("solver")) throw ConfigError(where + "solver", "required");
        SolverSpec spec;
        spec.kind = get_solver_kind(get_string(entry["solver"], where + "solver"), where + "solver");
        read_solver_knobs(entry, spec, where);
        inherit_knobs(spec, preset);
        try {
          validate(c, spec);
        } catch (const ConfigError& e) {
          throw ConfigError(where + e.field(), std::string(e.what()).substr(e.field().size() + 2));
        }
        if (!labels.insert(spec.label()).second) {
          throw ConfigError(where + "solver", "duplicate entry " + spec.label());
        }
        ex.solvers.push_back(spec);
      }
      break;
    }
    case Mode::kCondition:
      validate_problem(c);
      if (ex.power_iters < 10) throw ConfigError("power_iters", "must be >= 10");
      break;
  }
  return ex;
}

Experiment load_experiment(const std::filesystem::path& path, const Overrides& ov, Mode mode) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config", std::string("not valid JSON: ") + e.what());
  }
  return resolve(doc, ov, mode, path.parent_path());
}

Json solver_to_json(const SolverSpec& s) {
  Json j;
  j["solver"] = std::string(to_string(s.kind));
  if (s.memory_m) j["memory"] = *s.memory_m;
  if (s.n_cg) j["ncg"] = *s.n_cg;
  if (s.step) j["step"] = *s.step;
  return j;
}

namespace {

Json vector_json(const Vector& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

}  // namespace

Json to_json(const Experiment& ex, Mode mode) {
  const ExperimentConfig& c = ex.config;
  Json j;
  j["problem"] = std::string(to_string(c.problem));
  j["alpha"] = c.alpha;
  j["lambda"] = c.lambda;
  j["budget"] = c.budget ? Json(*c.budget) : Json(nullptr);
  j["max_iters"] = c.max_iters;
  j["tol"] = c.tol;
  if (c.problem == ProblemKind::kCustom) {
    const CustomProblem& cu = *c.custom;
    Json rows = Json::array();
    for (Index r = 0; r < cu.a.rows(); ++r) {
      Json row = Json::array();
      for (Index col = 0; col < cu.a.cols(); ++col) row.push_back(cu.a(r, col));
      rows.push_back(row);
    }
    j["a_matrix"] = rows;
    j["data"] = vector_json(cu.d);
    if (cu.truth) j["truth"] = vector_json(*cu.truth);
    j["regularizer"] = std::string(to_string(cu.regularizer));
    j["grid"] = {{"nx", cu.grid.nx}, {"ny", cu.grid.ny}};
  } else {
    j["seed"] = c.noise.seed;
    j["grid"] = {{"nx", c.grid.nx}, {"ny", c.grid.ny}};
    j["noise"] = {{"sigma_rel", c.noise.sigma_rel}, {"mute_fraction", c.noise.mute_fraction}};
    if (c.problem != ProblemKind::kDenoise2d) {
      j["kernel"] = {{"depth", c.kernel.depth}, {"length", c.kernel.length}, {"scale", c.kernel.scale}};
    }
    if (c.problem == ProblemKind::kSpikes1d) j["n_data"] = c.n_data;
  }
  if (c.constraint) j["constraint"] = vector_json(*c.constraint);
  switch (mode) {
    case Mode::kRun: {
      Json s = solver_to_json(ex.solvers.front());
      for (auto& [key, value] : s.items()) j[key] = value;
      break;
    }
    case Mode::kCompare:
      j["solvers"] = Json::array();
      for (const auto& s : ex.solvers) j["solvers"].push_back(solver_to_json(s));
      break;
    case Mode::kCondition:
      j["power_iters"] = ex.power_iters;
      break;
  }
  return j;
}

}  // namespace ccd::cli
