#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "flix/objectives.hpp"

namespace flix {

/// Per-client personalization weights, each in [0, 1].
class AlphaVector {
 public:
  explicit AlphaVector(Eigen::VectorXd values);
  static AlphaVector constant(int n, double beta);

  const Eigen::VectorXd& values() const { return values_; }
  int size() const { return static_cast<int>(values_.size()); }
  double operator[](int i) const { return values_[i]; }
  double max() const { return values_.maxCoeff(); }
  bool all_zero() const { return values_.maxCoeff() == 0.0; }

  /// The common value when every entry is equal, otherwise nullopt.
  std::optional<double> equal_value() const;

 private:
  Eigen::VectorXd values_;
};

/// Averages over clients of the per-client constants:
///   L_alpha = (1/n) sum alpha_i^2 L_i,  mu_alpha = (1/n) sum alpha_i^2 mu_i,
///   L_hat   = (1/n) sum L_i,            mu_hat   = (1/n) sum mu_i.
struct AggregateConstants {
  double L_alpha = 0.0;
  double mu_alpha = 0.0;
  double L_hat = 0.0;
  double mu_hat = 0.0;
};

/// One-shot averaging data: x_avg = sum w_i x_i with w_i = alpha_i^2 L_i /
/// (n L_alpha); D is the maximum pairwise squared distance of the local
/// models and V = sum w_i ||x_i - x_avg||^2 their weighted variance.
struct HeterogeneityConstants {
  Eigen::VectorXd x_avg;
  Eigen::VectorXd weights;
  double D = 0.0;
  double V = 0.0;
};

/// The personalized federated problem: n client objectives, the
/// personalization vector, and certified pure local models x_i
/// (||grad f_i(x_i)|| <= local_tolerance for every client). Immutable.
class FlixProblem {
 public:
  FlixProblem(std::vector<ObjectivePtr> clients, AlphaVector alpha,
              std::vector<Eigen::VectorXd> local_models,
              double local_tolerance = 1e-6);

  int num_clients() const { return static_cast<int>(clients_.size()); }
  int dim() const { return dim_; }
  const AlphaVector& alpha() const { return alpha_; }
  const ClientObjective& client(int i) const { return *clients_[static_cast<std::size_t>(i)]; }
  const ObjectivePtr& client_ptr(int i) const { return clients_[static_cast<std::size_t>(i)]; }
  const Eigen::VectorXd& local_model(int i) const { return local_models_[static_cast<std::size_t>(i)]; }
  const ObjectiveConstants& constants(int i) const { return constants_[static_cast<std::size_t>(i)]; }
  double local_tolerance() const { return local_tolerance_; }

  /// Same clients and local models under a different personalization vector.
  FlixProblem with_alpha(AlphaVector alpha) const;

 private:
  std::vector<ObjectivePtr> clients_;
  AlphaVector alpha_;
  std::vector<Eigen::VectorXd> local_models_;
  std::vector<ObjectiveConstants> constants_;
  double local_tolerance_;
  int dim_;
};

/// Deployed model on client i: T_i(x) = alpha_i x + (1 - alpha_i) x_i.
Eigen::VectorXd deploy(const FlixProblem& p, int i, const Eigen::VectorXd& x);

/// Objective value (1/n) sum_i f_i(T_i(x)).
double flix_value(const FlixProblem& p, const Eigen::VectorXd& x);

/// Client i's gradient contribution alpha_i grad f_i(T_i(x)).
Eigen::VectorXd flix_grad_client(const FlixProblem& p, int i,
                                 const Eigen::VectorXd& x);

/// Full gradient (1/n) sum_i alpha_i grad f_i(T_i(x)). Per-client terms may
/// be evaluated concurrently but the reduction is a fixed-order sequential
/// sum over client indices, so results are bit-reproducible.
Eigen::VectorXd flix_grad(const FlixProblem& p, const Eigen::VectorXd& x);

AggregateConstants aggregate_constants(const FlixProblem& p);

/// Requires at least one alpha_i > 0; throws otherwise (weights undefined).
HeterogeneityConstants one_shot_average(const FlixProblem& p);

/// Population variance of the deployed models,
/// (1/n) sum_i ||T_i(x) - mean_j T_j(x)||^2.
double deployed_variance(const FlixProblem& p, const Eigen::VectorXd& x);

/// Communication schedule for equal-alpha problems: with
/// A = sqrt(2 eps / (L_hat V)) and q = 1 / sqrt(1 - mu_hat / L_hat),
/// beta = 0 needs 0 communications, 0 < beta <= A needs 1 (compute x_avg),
/// and A q^{k-1} < beta <= A q^k needs k+1.
struct CommBudget {
  double epsilon = 0.0;
  double A = 0.0;
  double q = 0.0;  // +inf when mu_hat == L_hat (one descent round suffices)
  /// Heterogeneous-alpha sufficient one-shot threshold sqrt(2 eps / (L_hat D)).
  double hetero_alpha_bound = 0.0;

  long communications(double beta) const;
};

/// Requires an equal-alpha problem and mu_hat > 0.
CommBudget comm_budget(const FlixProblem& p, double epsilon);

}  // namespace flix
