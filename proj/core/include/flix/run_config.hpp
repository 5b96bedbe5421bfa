#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

namespace flix {

/// Declarative experiment description parsed from flat `section.key = value`
/// text. Unknown keys are errors; the master seed must be present so runs
/// never depend on wall-clock entropy.
struct RunConfig {
  // problem.*
  std::string problem_kind;  // libsvm | synthetic_logistic | synthetic_quadratic
  std::string libsvm_path;
  std::string libsvm_url;
  double lambda = 0.1;
  int clients = 0;
  int dim = 0;  // synthetic dimension; libsvm dimension override when > 0
  int per_client = 20;
  double mean_shift = 0.0;
  double feature_scale = 1.0;
  double spectrum_min = 1.0;
  double spectrum_max = 1.0;

  // alpha.*
  std::vector<double> alpha_grid;  // one entry for the scalar policy
  std::vector<double> alpha_list;  // per-client values; exclusive with grid

  // run.*
  std::string algorithm = "dgd";  // dgd | dcgd | diana
  long rounds = -1;               // -1 resolves to the per-algorithm default
  std::string stepsize = "theoretical";  // "theoretical" or a positive number
  std::uint64_t seed = 0;
  bool seed_present = false;

  // compressor.*
  std::string compressor_kind = "identity";  // identity | rand_k | k_sweep
  int compressor_k = 0;
  int sweep_count = 7;

  // local.*
  double local_tolerance = 1e-6;
  long local_max_iters = 2'000'000;

  // output.*
  std::string output_dir = "out";

  // budget.*
  bool budget_confirm = false;

  // verify.*
  double verify_stepsize_scale = 1.0;

  /// Documented defaults: 2000 rounds for dgd, 10000 for dcgd/diana.
  long resolved_rounds() const;
};

RunConfig parse_run_config(std::istream& input);
RunConfig load_run_config(const std::string& path);

/// Post-parse contract checks (lambda >= 0, nonempty grids, seed present,
/// recognized enum values). Throws std::invalid_argument.
void validate_run_config(const RunConfig& cfg);

}  // namespace flix
