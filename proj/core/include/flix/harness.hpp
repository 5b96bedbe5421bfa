#pragma once

#include <ostream>
#include <string>

#include "flix/problem.hpp"
#include "flix/run_config.hpp"

namespace flix {

/// Exit codes shared by the CLI and the command functions below.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // failed check or solver
inline constexpr int kExitUsage = 2;    // usage / config error

/// Builds the configured problem at a given personalization vector,
/// precomputing (or loading) the pure local models.
FlixProblem build_problem(const RunConfig& cfg, const AlphaVector& alpha);

/// Writes the certified local-model bundle (x_i, L_i, mu_i, gradient
/// certificates) to <output.dir>/local_models.bundle. Idempotent: identical
/// config produces a byte-identical bundle. A failed client removes the
/// partial bundle and returns nonzero.
int cmd_precompute_local(const RunConfig& cfg, std::ostream& log);

/// Executes the alpha-grid x k-grid cross product of solver runs; one metrics
/// CSV per run plus a manifest cross-referencing them. The reference optimum
/// is computed once per (problem, alpha). Divergence is recorded per-run and
/// the remaining runs proceed.
int cmd_run(const RunConfig& cfg, std::ostream& log);

/// Runs the full bound/invariant suite on built-in desk-scale problems;
/// writes a machine-readable JSON report to <output.dir>/verify_report.json.
/// Exit 0 iff every check passes.
int cmd_verify(const RunConfig& cfg, std::ostream& log);

/// Prints the communication ladder (A, q, beta intervals) for the configured
/// equal-alpha problem; with budget.confirm also runs DGD at each rung and
/// confirms epsilon is reached within the promised communication count.
int cmd_budget(const RunConfig& cfg, double epsilon, std::ostream& log);

}  // namespace flix
