#include "flix/problem.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "parallel.hpp"

namespace flix {

AlphaVector::AlphaVector(Eigen::VectorXd values) : values_(std::move(values)) {
  if (values_.size() < 1) {
    throw std::invalid_argument("AlphaVector: must be nonempty");
  }
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    if (!(values_[i] >= 0.0 && values_[i] <= 1.0)) {
      throw std::invalid_argument("AlphaVector: entries must lie in [0, 1]");
    }
  }
}

AlphaVector AlphaVector::constant(int n, double beta) {
  return AlphaVector(Eigen::VectorXd::Constant(n, beta));
}

std::optional<double> AlphaVector::equal_value() const {
  const double first = values_[0];
  for (Eigen::Index i = 1; i < values_.size(); ++i) {
    if (values_[i] != first) return std::nullopt;
  }
  return first;
}

FlixProblem::FlixProblem(std::vector<ObjectivePtr> clients, AlphaVector alpha,
                         std::vector<Eigen::VectorXd> local_models,
                         double local_tolerance)
    : clients_(std::move(clients)),
      alpha_(std::move(alpha)),
      local_models_(std::move(local_models)),
      local_tolerance_(local_tolerance) {
  const std::size_t n = clients_.size();
  if (n == 0) throw std::invalid_argument("FlixProblem: need at least one client");
  if (static_cast<std::size_t>(alpha_.size()) != n) {
    throw std::invalid_argument("FlixProblem: alpha size does not match client count");
  }
  if (local_models_.size() != n) {
    throw std::invalid_argument("FlixProblem: local model count does not match clients");
  }
  dim_ = clients_[0]->dim();
  constants_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (clients_[i]->dim() != dim_ || local_models_[i].size() != dim_) {
      throw std::invalid_argument("FlixProblem: dimension mismatch across clients");
    }
    const double residual = clients_[i]->gradient(local_models_[i]).norm();
    if (!(residual <= local_tolerance_)) {
      throw std::invalid_argument(
          "FlixProblem: local model " + std::to_string(i) +
          " is not certified (gradient norm " + std::to_string(residual) + ")");
    }
    constants_.push_back(clients_[i]->constants());
  }
}

FlixProblem FlixProblem::with_alpha(AlphaVector alpha) const {
  return FlixProblem(clients_, std::move(alpha), local_models_, local_tolerance_);
}

Eigen::VectorXd deploy(const FlixProblem& p, int i, const Eigen::VectorXd& x) {
  if (i < 0 || i >= p.num_clients()) {
    throw std::invalid_argument("deploy: client index out of range");
  }
  const double a = p.alpha()[i];
  return a * x + (1.0 - a) * p.local_model(i);
}

double flix_value(const FlixProblem& p, const Eigen::VectorXd& x) {
  const int n = p.num_clients();
  std::vector<double> terms(static_cast<std::size_t>(n));
  detail::for_each_index(n, [&](int i) {
    terms[static_cast<std::size_t>(i)] = p.client(i).value(deploy(p, i, x));
  });
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += terms[static_cast<std::size_t>(i)];
  return sum / static_cast<double>(n);
}

Eigen::VectorXd flix_grad_client(const FlixProblem& p, int i,
                                 const Eigen::VectorXd& x) {
  return p.alpha()[i] * p.client(i).gradient(deploy(p, i, x));
}

Eigen::VectorXd flix_grad(const FlixProblem& p, const Eigen::VectorXd& x) {
  const int n = p.num_clients();
  std::vector<Eigen::VectorXd> terms(static_cast<std::size_t>(n));
  detail::for_each_index(n, [&](int i) {
    terms[static_cast<std::size_t>(i)] = flix_grad_client(p, i, x);
  });
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(p.dim());
  for (int i = 0; i < n; ++i) sum += terms[static_cast<std::size_t>(i)];
  return sum / static_cast<double>(n);
}

AggregateConstants aggregate_constants(const FlixProblem& p) {
  AggregateConstants out;
  const int n = p.num_clients();
  for (int i = 0; i < n; ++i) {
    const double a2 = p.alpha()[i] * p.alpha()[i];
    out.L_alpha += a2 * p.constants(i).L;
    out.mu_alpha += a2 * p.constants(i).mu;
    out.L_hat += p.constants(i).L;
    out.mu_hat += p.constants(i).mu;
  }
  out.L_alpha /= n;
  out.mu_alpha /= n;
  out.L_hat /= n;
  out.mu_hat /= n;
  return out;
}

HeterogeneityConstants one_shot_average(const FlixProblem& p) {
  if (p.alpha().all_zero()) {
    throw std::invalid_argument("one_shot_average: all alpha are zero, weights undefined");
  }
  const int n = p.num_clients();
  const double L_alpha = aggregate_constants(p).L_alpha;

  HeterogeneityConstants out;
  out.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const double a2 = p.alpha()[i] * p.alpha()[i];
    out.weights[i] = a2 * p.constants(i).L / (static_cast<double>(n) * L_alpha);
  }
  out.x_avg = Eigen::VectorXd::Zero(p.dim());
  for (int i = 0; i < n; ++i) out.x_avg += out.weights[i] * p.local_model(i);

  for (int i = 0; i < n; ++i) {
    out.V += out.weights[i] * (p.local_model(i) - out.x_avg).squaredNorm();
    for (int j = i + 1; j < n; ++j) {
      const double dist2 = (p.local_model(i) - p.local_model(j)).squaredNorm();
      if (dist2 > out.D) out.D = dist2;
    }
  }
  return out;
}

double deployed_variance(const FlixProblem& p, const Eigen::VectorXd& x) {
  const int n = p.num_clients();
  Eigen::MatrixXd deployed(p.dim(), n);
  for (int i = 0; i < n; ++i) deployed.col(i) = deploy(p, i, x);
  // Pairwise form of the population variance,
  // (1/n) sum_i ||y_i - mean||^2 = (1/n^2) sum_{i<j} ||y_i - y_j||^2;
  // exact when all deployed models coincide (alpha = 1).
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      sum += (deployed.col(i) - deployed.col(j)).squaredNorm();
    }
  }
  return sum / (static_cast<double>(n) * static_cast<double>(n));
}

long CommBudget::communications(double beta) const {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw std::invalid_argument("CommBudget: beta must lie in [0, 1]");
  }
  if (beta == 0.0) return 0;
  if (beta <= A) return 1;
  if (std::isinf(q)) return 2;  // contraction factor 0: one descent round
  // Smallest k >= 1 with beta <= A q^k; guard the log against roundoff.
  long k = static_cast<long>(std::ceil(std::log(beta / A) / std::log(q)));
  if (k < 1) k = 1;
  while (beta > A * std::pow(q, static_cast<double>(k))) ++k;
  while (k > 1 && beta <= A * std::pow(q, static_cast<double>(k - 1))) --k;
  return k + 1;
}

CommBudget comm_budget(const FlixProblem& p, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("comm_budget: epsilon must be > 0");
  if (!p.alpha().equal_value().has_value()) {
    throw std::invalid_argument("comm_budget: the ladder is stated for equal alpha");
  }
  const AggregateConstants agg = aggregate_constants(p);
  if (!(agg.mu_hat > 0.0)) {
    throw std::invalid_argument("comm_budget: mu_hat must be > 0 (q undefined)");
  }

  // V and the weights are beta-free for equal alpha (w_i = L_i / sum L_j),
  // so evaluate them at alpha = 1.
  const FlixProblem unit = p.with_alpha(AlphaVector::constant(p.num_clients(), 1.0));
  const HeterogeneityConstants het = one_shot_average(unit);

  CommBudget out;
  out.epsilon = epsilon;
  out.A = std::sqrt(2.0 * epsilon / (agg.L_hat * het.V));
  const double ratio = agg.mu_hat / agg.L_hat;
  out.q = ratio < 1.0 ? 1.0 / std::sqrt(1.0 - ratio)
                      : std::numeric_limits<double>::infinity();
  out.hetero_alpha_bound = std::sqrt(2.0 * epsilon) / std::sqrt(agg.L_hat * het.D);
  return out;
}

}  // namespace flix
