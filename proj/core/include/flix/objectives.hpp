#pragma once

#include <Eigen/Core>
#include <memory>

namespace flix {

/// Smoothness and strong-convexity constants of a client loss, 0 <= mu <= L.
struct ObjectiveConstants {
  double L = 0.0;
  double mu = 0.0;
};

/// A differentiable client loss with known constants. Immutable after
/// construction; safe to evaluate from multiple threads concurrently.
class ClientObjective {
 public:
  virtual ~ClientObjective() = default;

  virtual int dim() const = 0;
  virtual double value(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd gradient(const Eigen::VectorXd& x) const = 0;
  virtual ObjectiveConstants constants() const = 0;
};

using ObjectivePtr = std::shared_ptr<const ClientObjective>;

/// Regularized logistic loss over signed rows a_j (labels folded into the
/// sign of each row):
///   f(x) = (1/k) sum_j log(1 + exp(-a_j^T x)) + (lambda/2) ||x||^2.
/// L = (1/(4k)) lambda_max(sum_j a_j a_j^T) + lambda, mu = lambda.
class LogisticObjective final : public ClientObjective {
 public:
  LogisticObjective(Eigen::MatrixXd signed_rows, double lambda);

  int dim() const override { return static_cast<int>(rows_.cols()); }
  double value(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override;
  ObjectiveConstants constants() const override { return constants_; }

  const Eigen::MatrixXd& rows() const { return rows_; }
  double lambda() const { return lambda_; }

 private:
  Eigen::MatrixXd rows_;  // k x d
  double lambda_;
  ObjectiveConstants constants_;
};

/// f(x) = (1/2) x^T A x - b^T x + c with A symmetric positive definite.
/// The exact minimizer A^{-1} b is computed by a direct symmetric solve.
class QuadraticObjective final : public ClientObjective {
 public:
  QuadraticObjective(Eigen::MatrixXd A, Eigen::VectorXd b, double c = 0.0);

  int dim() const override { return static_cast<int>(A_.rows()); }
  double value(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override;
  ObjectiveConstants constants() const override { return constants_; }

  const Eigen::MatrixXd& matrix() const { return A_; }
  const Eigen::VectorXd& linear_term() const { return b_; }
  double offset() const { return c_; }
  const Eigen::VectorXd& minimizer() const { return minimizer_; }

 private:
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
  double c_;
  Eigen::VectorXd minimizer_;
  ObjectiveConstants constants_;
};

/// Largest eigenvalue of the Gram matrix G = rows^T rows, via power iteration
/// on the implicit operator v -> rows^T (rows v); the d x d matrix is never
/// formed. Deterministic all-ones start, relative tolerance on the Rayleigh
/// quotient. Throws ConvergenceFailure with the iteration count on failure.
double gram_spectral_norm(const Eigen::MatrixXd& rows, double rel_tol = 1e-9,
                          int max_iters = 10000);

}  // namespace flix
