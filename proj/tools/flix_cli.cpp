// Command-line front end: declarative experiment runner for the personalized
// federated formulation. Subcommands: precompute-local, run, verify, budget.

#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <string>

#include "flix/errors.hpp"
#include "flix/harness.hpp"
#include "flix/run_config.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::int64_t seed = -1;
  bool seed_given = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Run configuration file")
      ->required();
  cmd->add_option("--out", args.out_dir, "Output directory (overrides output.dir)");
  cmd->add_option("--seed", args.seed, "Master seed (overrides run.seed)");
}

flix::RunConfig load(const CommonArgs& args, const CLI::App* cmd) {
  flix::RunConfig cfg = flix::load_run_config(args.config_path);
  if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;
  if (cmd->count("--seed") > 0) {
    cfg.seed = static_cast<std::uint64_t>(args.seed);
    cfg.seed_present = true;
  }
  flix::validate_run_config(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Personalized federated optimization laboratory"};
  app.require_subcommand(1);

  CommonArgs precompute_args, run_args, verify_args, budget_args;
  double epsilon = 1e-3;

  CLI::App* precompute = app.add_subcommand(
      "precompute-local", "Solve every client's pure local model and write the bundle");
  add_common(precompute, precompute_args);

  CLI::App* run = app.add_subcommand(
      "run", "Execute the configured alpha-grid x k-grid solver sweep");
  add_common(run, run_args);

  CLI::App* verify = app.add_subcommand(
      "verify", "Run the bound/invariant suite on built-in desk-scale problems");
  add_common(verify, verify_args);

  CLI::App* budget = app.add_subcommand(
      "budget", "Print the communication ladder for an equal-alpha problem");
  add_common(budget, budget_args);
  budget->add_option("--epsilon", epsilon, "Target suboptimality")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? flix::kExitOk : flix::kExitUsage;
  }

  try {
    if (precompute->parsed()) {
      return flix::cmd_precompute_local(load(precompute_args, precompute), std::cout);
    }
    if (run->parsed()) {
      return flix::cmd_run(load(run_args, run), std::cout);
    }
    if (verify->parsed()) {
      return flix::cmd_verify(load(verify_args, verify), std::cout);
    }
    if (budget->parsed()) {
      return flix::cmd_budget(load(budget_args, budget), epsilon, std::cout);
    }
  } catch (const flix::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return flix::kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return flix::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return flix::kExitFailure;
  }
  return flix::kExitUsage;
}
