#include "commands.hpp"

#include "ccd/version.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

void add_common(CLI::App* cmd, ccd::cli::CommandOptions& opt, bool solver_flags) {
  auto& ov = opt.overrides;
  cmd->add_option("config", opt.config, "experiment JSON")->required();
  cmd->add_option("--seed", ov.seed, "noise seed");
  cmd->add_option("--lambda", ov.lambda, "splitting weight");
  cmd->add_option("--alpha", ov.alpha, "data-fit weight");
  if (!solver_flags) return;
  cmd->add_option("--out", opt.out_dir, "output directory")->default_str("out");
  cmd->add_option("--budget", ov.budget, "cap on combined A and A^T applications");
  cmd->add_option("--solver", ov.solver, "solver name (run only)");
  cmd->add_option("--memory", ov.memory, "lmccd memory m (run only)");
  cmd->add_option("--ncg", ov.ncg, "rcg inner iterations (run only)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matrix-free L1 / total-variation least squares"};
  app.set_version_flag("--version", std::string(ccd::kVersion));
  app.require_subcommand(1);

  ccd::cli::CommandOptions run_opt;
  ccd::cli::CommandOptions compare_opt;
  ccd::cli::CommandOptions cond_opt;
  auto* run = app.add_subcommand("run", "solve one experiment with one solver");
  auto* compare = app.add_subcommand("compare", "run several solvers on the same data");
  auto* cond = app.add_subcommand("cond", "estimate the condition number of the u-step");
  add_common(run, run_opt, true);
  add_common(compare, compare_opt, true);
  add_common(cond, cond_opt, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ccd::cli::kExitOk : ccd::cli::kExitConfig;
  }

  if (*run) return ccd::cli::run_command(run_opt);
  if (*compare) return ccd::cli::compare_command(compare_opt);
  return ccd::cli::condition_command(cond_opt, std::cout);
}
