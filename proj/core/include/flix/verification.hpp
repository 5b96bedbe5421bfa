#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "flix/compression.hpp"
#include "flix/problem.hpp"
#include "flix/solvers.hpp"

namespace flix {

/// A solution of the problem with a gradient-norm certificate.
struct ReferenceOptimum {
  Eigen::VectorXd x_star;
  double f_star = 0.0;
  double certificate = 0.0;  // ||grad f~(x_star)||
};

/// Exact minimizer for all-quadratic problems: solves
/// (sum alpha_i^2 A_i) x = sum alpha_i^2 A_i x_i directly.
Eigen::VectorXd quad_flix_minimizer(const FlixProblem& p);

/// Quadratic problems use quad_flix_minimizer; otherwise gradient descent at
/// 1/L_alpha until ||grad f~|| <= tol. Requires mu_alpha > 0 or quadratic
/// clients, and at least one alpha_i > 0.
ReferenceOptimum high_precision_optimum(const FlixProblem& p, double tol = 1e-12,
                                        long max_iters = 50'000'000);

/// Runs `steps` plain GD iterations on f(x) = x'Ax/2 - b'x from x0 and
/// compares against the closed form (I - J^H) x_min + J^H x0 with
/// J = I - gamma A. Returns the max coordinate deviation.
double check_quad_finetune(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                           const Eigen::VectorXd& x0, double gamma, int steps);

/// Per-round convergence-rate audit of a DGD trajectory started at x_avg.
struct DgdRateReport {
  bool pointwise_ok = true;       // gap_k <= (1 - mu_a/L_a)^k gap_0
  long pointwise_violation = -1;
  bool general_ok = true;         // gap_k <= (1 - mu_a/L_a)^k alpha_max^2 L_hat D / 2
  long general_violation = -1;
  bool equal_alpha_ok = true;     // gap_k <= (1 - mu_hat/L_hat)^k beta^2 L_hat V / 2
  long equal_alpha_violation = -1;
  bool has_equal_alpha = false;

  bool all_ok() const { return pointwise_ok && general_ok && equal_alpha_ok; }
};

DgdRateReport check_dgd_rate(const FlixProblem& p, const Trajectory& traj,
                             const ReferenceOptimum& ref);

/// DCGD's convergence neighborhood,
/// (2 gamma / (mu_alpha n^2)) sum_i omega_i ||alpha_i grad f_i(T_i(x*))||^2.
double dcgd_floor(const FlixProblem& p, const std::vector<CompressorSpec>& specs,
                  double gamma, const ReferenceOptimum& ref);

/// Max over seeded random pairs of ||grad f~(x) - grad f~(y)|| / ||x - y||;
/// never exceeds L_alpha (1 + 1e-9) when the constants are right.
double estimate_smoothness(const FlixProblem& p, int samples, std::uint64_t seed);

/// First trajectory round whose loss gap is <= threshold, or -1.
long rounds_to_gap(const Trajectory& traj, double f_star, double threshold);

// Desk-scale problem factories shared by the check suite, the CLI and tests.
FlixProblem make_synthetic_logistic_problem(int clients, int dim, int per_client,
                                            double lambda, double mean_shift,
                                            double beta, std::uint64_t seed,
                                            double feature_scale = 1.0);
FlixProblem make_synthetic_quadratic_problem(int clients, int dim,
                                             double spectrum_min,
                                             double spectrum_max, double beta,
                                             std::uint64_t seed);
/// Two anisotropic 2-D quadratics with mu_hat < L_hat and distinct local
/// models; the standing example for budget-ladder checks.
FlixProblem make_two_quadratic_problem(double beta);

/// One named bound or invariant, its measured value and the bound it must
/// respect (measured <= bound).
struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double bound = 0.0;
  std::string detail;
};

/// Executable desk-scale audit of the shipped convergence bounds and
/// structural identities. `dgd_stepsize_scale` scales the DGD stepsize away from 1/L_alpha
/// (fault injection for the rate check); 1.0 is the honest suite.
std::vector<CheckResult> run_check_suite(std::uint64_t seed,
                                         double dgd_stepsize_scale = 1.0);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace flix
