#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flix/compression.hpp"
#include "flix/problem.hpp"

namespace flix {

/// Either the per-algorithm theoretical stepsize or an explicit one.
class StepsizeMode {
 public:
  static StepsizeMode theoretical() { return StepsizeMode(std::nullopt); }
  static StepsizeMode manual(double gamma);

  bool is_theoretical() const { return !gamma_.has_value(); }
  double manual_gamma() const { return *gamma_; }

 private:
  explicit StepsizeMode(std::optional<double> gamma) : gamma_(gamma) {}
  std::optional<double> gamma_;
};

/// x^0 = x_avg (default) or an explicit vector.
class InitPoint {
 public:
  static InitPoint one_shot() { return InitPoint(std::nullopt); }
  static InitPoint at(Eigen::VectorXd x0) { return InitPoint(std::move(x0)); }

  bool is_one_shot() const { return !x0_.has_value(); }
  const Eigen::VectorXd& vector() const { return *x0_; }

 private:
  explicit InitPoint(std::optional<Eigen::VectorXd> x0) : x0_(std::move(x0)) {}
  std::optional<Eigen::VectorXd> x0_;
};

/// DIANA's working memory: per-client gradient estimates h_i, their
/// fixed-order average h (maintained incrementally), and the memory learning
/// rates beta_i in (0, 1/(omega_i + 1)].
struct DianaState {
  std::vector<Eigen::VectorXd> memories;  // h_i
  Eigen::VectorXd memory_avg;             // h = average of h_i
  std::vector<double> rates;              // beta_i

  /// Recomputes the average from the memories and throws
  /// InternalConsistencyError when the incremental copy drifted past `tol`.
  void check_consistency(double tol = 1e-10) const;
};

struct TrajectoryPoint {
  long round = 0;
  double objective = 0.0;      // f~(x^k)
  double grad_norm_sq = 0.0;   // ||grad f~(x^k)||^2
  double avg_deploy_dist_sq =  // (1/n) sum ||T_i(x^k) - T_i(x*)||^2, NaN if no reference
      0.0;
  double uplink_floats = 0.0;  // cumulative gradient-uplink floats
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  Eigen::VectorXd final_iterate;

  // Run metadata.
  std::string algorithm;
  std::string init;
  double gamma = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> omegas;        // per-client compressor variances
  std::vector<double> memory_rates;  // DIANA beta_i (empty otherwise)
};

/// Pure local pretraining: gradient descent from zero with step 1/L until
/// ||grad f(x)|| <= tol. Quadratics take the direct solve and must satisfy
/// the same certificate. Throws ConvergenceFailure past max_iters.
Eigen::VectorXd solve_local(const ClientObjective& obj, double tol = 1e-6,
                            long max_iters = 2'000'000);

struct DgdOptions {
  StepsizeMode stepsize = StepsizeMode::theoretical();  // 1/L_alpha
  long rounds = 0;                                      // K
  InitPoint init = InitPoint::one_shot();
  const Eigen::VectorXd* reference = nullptr;  // x* for the deploy-distance metric
  /// Stop early once f~(x^k) drops to this value (still recorded).
  std::optional<double> stop_objective;
};

/// Distributed gradient descent:
/// x^{k+1} = x^k - (gamma/n) sum_i alpha_i grad f_i(T_i(x^k)).
/// Uplink: n*d floats per round.
Trajectory run_dgd(const FlixProblem& p, const DgdOptions& opt);

struct CompressedOptions {
  std::vector<CompressorSpec> specs;  // one per client
  StepsizeMode stepsize = StepsizeMode::theoretical();
  long rounds = 0;
  std::uint64_t seed = 0;
  InitPoint init = InitPoint::one_shot();
  const Eigen::VectorXd* reference = nullptr;
  /// DIANA memory rates beta_i; defaults to 1/(omega_i + 1). Ignored by DCGD.
  std::vector<double> memory_rates;
  /// Re-verify the incrementally maintained memory average every round.
  bool check_memory_drift = false;
  /// Stop early once f~(x^k) drops to this value (still recorded).
  std::optional<double> stop_objective;
};

/// Distributed compressed gradient descent: each client uplinks
/// C_i(alpha_i grad f_i(T_i(x^k))); the server averages in fixed order.
/// Theoretical stepsize 1/(L_alpha + 2 max_i{L_i alpha_i^2 omega_i}/n) when
/// mu_alpha > 0, and a quarter of that in the convex case.
Trajectory run_dcgd(const FlixProblem& p, const CompressedOptions& opt);

/// DIANA: per-client memories h_i learn the optimal gradients. Clients
/// uplink compressed memory residuals; the neighborhood of DCGD disappears.
/// h_i^0 = alpha_i grad f_i(T_i(x^0)).
Trajectory run_diana(const FlixProblem& p, const CompressedOptions& opt);

double dgd_theoretical_stepsize(const FlixProblem& p);
double dcgd_theoretical_stepsize(const FlixProblem& p,
                                 const std::vector<CompressorSpec>& specs);
double diana_theoretical_stepsize(const FlixProblem& p,
                                  const std::vector<CompressorSpec>& specs,
                                  const std::vector<double>& memory_rates);

}  // namespace flix
