#include "flix/objectives.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "flix/errors.hpp"

namespace flix {

namespace {

// log(1 + exp(-t)), stable for both signs of t.
inline double log1p_exp_neg(double t) {
  if (t >= 0.0) return std::log1p(std::exp(-t));
  return -t + std::log1p(std::exp(t));
}

// sigmoid(-t) = 1 / (1 + exp(t)), stable for both signs of t.
inline double sigmoid_neg(double t) {
  if (t >= 0.0) {
    const double e = std::exp(-t);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(t));
}

}  // namespace

LogisticObjective::LogisticObjective(Eigen::MatrixXd signed_rows, double lambda)
    : rows_(std::move(signed_rows)), lambda_(lambda) {
  if (rows_.rows() < 1) {
    throw std::invalid_argument("LogisticObjective: need at least one data row");
  }
  if (!rows_.allFinite()) {
    throw std::invalid_argument("LogisticObjective: data rows must be finite");
  }
  if (lambda_ < 0.0) {
    throw std::invalid_argument("LogisticObjective: lambda must be >= 0");
  }
  const double k = static_cast<double>(rows_.rows());
  constants_.L = gram_spectral_norm(rows_) / (4.0 * k) + lambda_;
  constants_.mu = lambda_;
}

double LogisticObjective::value(const Eigen::VectorXd& x) const {
  if (x.size() != rows_.cols()) {
    throw std::invalid_argument("LogisticObjective::value: dimension mismatch");
  }
  const Eigen::VectorXd margins = rows_ * x;
  double sum = 0.0;
  for (Eigen::Index j = 0; j < margins.size(); ++j) {
    sum += log1p_exp_neg(margins[j]);
  }
  return sum / static_cast<double>(rows_.rows()) +
         0.5 * lambda_ * x.squaredNorm();
}

Eigen::VectorXd LogisticObjective::gradient(const Eigen::VectorXd& x) const {
  if (x.size() != rows_.cols()) {
    throw std::invalid_argument("LogisticObjective::gradient: dimension mismatch");
  }
  const Eigen::VectorXd margins = rows_ * x;
  Eigen::VectorXd weights(margins.size());
  for (Eigen::Index j = 0; j < margins.size(); ++j) {
    weights[j] = sigmoid_neg(margins[j]);
  }
  return -(rows_.transpose() * weights) / static_cast<double>(rows_.rows()) +
         lambda_ * x;
}

QuadraticObjective::QuadraticObjective(Eigen::MatrixXd A, Eigen::VectorXd b,
                                       double c)
    : A_(std::move(A)), b_(std::move(b)), c_(c) {
  if (A_.rows() != A_.cols() || A_.rows() < 1) {
    throw std::invalid_argument("QuadraticObjective: A must be square and nonempty");
  }
  if (b_.size() != A_.rows()) {
    throw std::invalid_argument("QuadraticObjective: b dimension mismatch");
  }
  const double scale = A_.cwiseAbs().maxCoeff();
  if ((A_ - A_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1.0)) {
    throw std::invalid_argument("QuadraticObjective: A must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A_, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw std::invalid_argument("QuadraticObjective: eigendecomposition failed");
  }
  constants_.mu = eig.eigenvalues().minCoeff();
  constants_.L = eig.eigenvalues().maxCoeff();
  if (constants_.mu <= 0.0) {
    throw std::invalid_argument("QuadraticObjective: A must be positive definite");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(A_);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("QuadraticObjective: Cholesky factorization failed");
  }
  minimizer_ = llt.solve(b_);
}

double QuadraticObjective::value(const Eigen::VectorXd& x) const {
  if (x.size() != A_.rows()) {
    throw std::invalid_argument("QuadraticObjective::value: dimension mismatch");
  }
  return 0.5 * x.dot(A_ * x) - b_.dot(x) + c_;
}

Eigen::VectorXd QuadraticObjective::gradient(const Eigen::VectorXd& x) const {
  if (x.size() != A_.rows()) {
    throw std::invalid_argument("QuadraticObjective::gradient: dimension mismatch");
  }
  return A_ * x - b_;
}

double gram_spectral_norm(const Eigen::MatrixXd& rows, double rel_tol,
                          int max_iters) {
  const Eigen::Index d = rows.cols();
  if (d == 0 || rows.rows() == 0) return 0.0;

  Eigen::VectorXd v = Eigen::VectorXd::Ones(d) / std::sqrt(static_cast<double>(d));
  double rayleigh = 0.0;
  for (int iter = 0; iter < max_iters; ++iter) {
    Eigen::VectorXd w = rows.transpose() * (rows * v);
    const double norm = w.norm();
    if (norm == 0.0) {
      // The all-ones start landed in the null space; restart deterministically
      // from a basis vector. If every basis vector is annihilated the Gram
      // matrix is zero.
      const Eigen::Index j = iter % d;
      if (iter >= d) return 0.0;
      v = Eigen::VectorXd::Unit(d, j);
      continue;
    }
    const double next = v.dot(w);
    v = w / norm;
    if (iter > 0 && std::abs(next - rayleigh) <= rel_tol * std::abs(next)) {
      return next;
    }
    rayleigh = next;
  }
  throw ConvergenceFailure("power iteration did not converge", max_iters, rayleigh);
}

}  // namespace flix
