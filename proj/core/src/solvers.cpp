#include "flix/solvers.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "flix/errors.hpp"
#include "flix/rng.hpp"
#include "parallel.hpp"

namespace flix {

namespace {

double quiet_nan() { return std::numeric_limits<double>::quiet_NaN(); }

Eigen::VectorXd resolve_init(const FlixProblem& p, const InitPoint& init) {
  if (init.is_one_shot()) return one_shot_average(p).x_avg;
  if (init.vector().size() != p.dim()) {
    throw std::invalid_argument("solver init: dimension mismatch");
  }
  return init.vector();
}

double deploy_distance_sq(const FlixProblem& p, const Eigen::VectorXd& x,
                          const Eigen::VectorXd* reference) {
  if (reference == nullptr) return quiet_nan();
  // T_i(x) - T_i(x*) = alpha_i (x - x*).
  const double base = (x - *reference).squaredNorm();
  double sum = 0.0;
  for (int i = 0; i < p.num_clients(); ++i) {
    sum += p.alpha()[i] * p.alpha()[i] * base;
  }
  return sum / static_cast<double>(p.num_clients());
}

void record_point(Trajectory& traj, const FlixProblem& p, long round,
                  const Eigen::VectorXd& x, double uplink,
                  const Eigen::VectorXd* reference) {
  TrajectoryPoint pt;
  pt.round = round;
  pt.objective = flix_value(p, x);
  pt.grad_norm_sq = flix_grad(p, x).squaredNorm();
  pt.avg_deploy_dist_sq = deploy_distance_sq(p, x, reference);
  pt.uplink_floats = uplink;
  traj.points.push_back(pt);
}

void require_finite(const Eigen::VectorXd& x, const char* algorithm, long round) {
  if (!x.allFinite()) {
    throw DivergedError(std::string(algorithm) + " produced a non-finite iterate",
                        round);
  }
}

void validate_specs(const FlixProblem& p, const std::vector<CompressorSpec>& specs) {
  if (static_cast<int>(specs.size()) != p.num_clients()) {
    throw std::invalid_argument("compressed solver: need one compressor per client");
  }
  for (const CompressorSpec& s : specs) {
    if (s.dim() != p.dim()) {
      throw std::invalid_argument("compressed solver: compressor dimension mismatch");
    }
  }
}

void require_positive_alpha(const FlixProblem& p) {
  if (p.alpha().all_zero()) {
    throw std::invalid_argument("solver: all alpha are zero, objective is constant");
  }
}

std::vector<double> default_memory_rates(const std::vector<CompressorSpec>& specs) {
  std::vector<double> rates;
  rates.reserve(specs.size());
  for (const CompressorSpec& s : specs) rates.push_back(1.0 / (s.omega() + 1.0));
  return rates;
}

// max_i { L_i alpha_i^2 omega_i }
double max_weighted_omega(const FlixProblem& p,
                          const std::vector<CompressorSpec>& specs) {
  double m = 0.0;
  for (int i = 0; i < p.num_clients(); ++i) {
    const double a2 = p.alpha()[i] * p.alpha()[i];
    const double v = p.constants(i).L * a2 * specs[static_cast<std::size_t>(i)].omega();
    if (v > m) m = v;
  }
  return m;
}

}  // namespace

StepsizeMode StepsizeMode::manual(double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("StepsizeMode: gamma must be > 0");
  return StepsizeMode(std::optional<double>(gamma));
}

void DianaState::check_consistency(double tol) const {
  Eigen::VectorXd recomputed = Eigen::VectorXd::Zero(memory_avg.size());
  for (const Eigen::VectorXd& h : memories) recomputed += h;
  recomputed /= static_cast<double>(memories.size());
  if ((recomputed - memory_avg).norm() > tol) {
    throw InternalConsistencyError(
        "diana: memory average drifted from the per-client memories");
  }
}

Eigen::VectorXd solve_local(const ClientObjective& obj, double tol, long max_iters) {
  if (const auto* quad = dynamic_cast<const QuadraticObjective*>(&obj)) {
    Eigen::VectorXd x = quad->minimizer();
    const double residual = obj.gradient(x).norm();
    if (!(residual <= tol)) {
      throw ConvergenceFailure("direct local solve failed its certificate", 0, residual);
    }
    return x;
  }
  const double L = obj.constants().L;
  if (!(L > 0.0)) throw std::invalid_argument("solve_local: smoothness constant unknown");
  const double gamma = 1.0 / L;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(obj.dim());
  Eigen::VectorXd grad = obj.gradient(x);
  for (long iter = 0; iter < max_iters; ++iter) {
    if (grad.norm() <= tol) return x;
    x -= gamma * grad;
    grad = obj.gradient(x);
  }
  const double residual = grad.norm();
  if (residual <= tol) return x;
  throw ConvergenceFailure("local pretraining did not converge", max_iters, residual);
}

double dgd_theoretical_stepsize(const FlixProblem& p) {
  const double L_alpha = aggregate_constants(p).L_alpha;
  if (!(L_alpha > 0.0)) {
    throw std::invalid_argument("dgd stepsize: L_alpha must be > 0");
  }
  return 1.0 / L_alpha;
}

double dcgd_theoretical_stepsize(const FlixProblem& p,
                                 const std::vector<CompressorSpec>& specs) {
  const AggregateConstants agg = aggregate_constants(p);
  const double denom =
      agg.L_alpha + 2.0 * max_weighted_omega(p, specs) / p.num_clients();
  if (!(denom > 0.0)) throw std::invalid_argument("dcgd stepsize: degenerate constants");
  // Strongly convex rate needs mu_alpha > 0; otherwise the convex-case step.
  return agg.mu_alpha > 0.0 ? 1.0 / denom : 1.0 / (4.0 * denom);
}

double diana_theoretical_stepsize(const FlixProblem& p,
                                  const std::vector<CompressorSpec>& specs,
                                  const std::vector<double>& memory_rates) {
  const AggregateConstants agg = aggregate_constants(p);
  const double n = p.num_clients();
  double min_rate = 1.0;
  double max_rate_term = 0.0;  // max_i { beta_i omega_i L_i alpha_i^2 }
  for (int i = 0; i < p.num_clients(); ++i) {
    const double beta_i = memory_rates[static_cast<std::size_t>(i)];
    const double a2 = p.alpha()[i] * p.alpha()[i];
    min_rate = std::min(min_rate, beta_i);
    max_rate_term = std::max(
        max_rate_term,
        beta_i * specs[static_cast<std::size_t>(i)].omega() * p.constants(i).L * a2);
  }
  const double denom = agg.L_alpha + 2.0 * max_weighted_omega(p, specs) / n +
                       4.0 * max_rate_term / (n * min_rate);
  if (!(denom > 0.0)) throw std::invalid_argument("diana stepsize: degenerate constants");
  return agg.mu_alpha > 0.0 ? 1.0 / denom : 1.0 / (4.0 * denom);
}

Trajectory run_dgd(const FlixProblem& p, const DgdOptions& opt) {
  if (opt.rounds < 0) throw std::invalid_argument("run_dgd: rounds must be >= 0");
  require_positive_alpha(p);

  Trajectory traj;
  traj.algorithm = "dgd";
  traj.init = opt.init.is_one_shot() ? "one_shot" : "vector";
  traj.gamma = opt.stepsize.is_theoretical() ? dgd_theoretical_stepsize(p)
                                             : opt.stepsize.manual_gamma();

  const int n = p.num_clients();
  const double per_round_floats = static_cast<double>(n) * p.dim();
  Eigen::VectorXd x = resolve_init(p, opt.init);
  for (long k = 0; k <= opt.rounds; ++k) {
    const Eigen::VectorXd grad = flix_grad(p, x);
    TrajectoryPoint pt;
    pt.round = k;
    pt.objective = flix_value(p, x);
    pt.grad_norm_sq = grad.squaredNorm();
    pt.avg_deploy_dist_sq = deploy_distance_sq(p, x, opt.reference);
    pt.uplink_floats = per_round_floats * static_cast<double>(k);
    traj.points.push_back(pt);
    if (k == opt.rounds) break;
    if (opt.stop_objective && pt.objective <= *opt.stop_objective) break;
    x -= traj.gamma * grad;
    require_finite(x, "dgd", k + 1);
  }
  traj.final_iterate = std::move(x);
  return traj;
}

Trajectory run_dcgd(const FlixProblem& p, const CompressedOptions& opt) {
  if (opt.rounds < 0) throw std::invalid_argument("run_dcgd: rounds must be >= 0");
  require_positive_alpha(p);
  validate_specs(p, opt.specs);

  Trajectory traj;
  traj.algorithm = "dcgd";
  traj.init = opt.init.is_one_shot() ? "one_shot" : "vector";
  traj.seed = opt.seed;
  for (const CompressorSpec& s : opt.specs) traj.omegas.push_back(s.omega());
  traj.gamma = opt.stepsize.is_theoretical()
                   ? dcgd_theoretical_stepsize(p, opt.specs)
                   : opt.stepsize.manual_gamma();

  const int n = p.num_clients();
  double per_round_floats = 0.0;
  for (const CompressorSpec& s : opt.specs) per_round_floats += s.payload_floats();

  Eigen::VectorXd x = resolve_init(p, opt.init);
  record_point(traj, p, 0, x, 0.0, opt.reference);
  std::vector<Eigen::VectorXd> messages(static_cast<std::size_t>(n));
  for (long k = 1;
       k <= opt.rounds &&
       !(opt.stop_objective && traj.points.back().objective <= *opt.stop_objective);
       ++k) {
    detail::for_each_index(n, [&](int i) {
      Rng rng = Rng::for_client(opt.seed, i, k - 1);
      messages[static_cast<std::size_t>(i)] =
          compress(opt.specs[static_cast<std::size_t>(i)],
                   flix_grad_client(p, i, x), rng);
    });
    Eigen::VectorXd direction = Eigen::VectorXd::Zero(p.dim());
    for (int i = 0; i < n; ++i) direction += messages[static_cast<std::size_t>(i)];
    direction /= static_cast<double>(n);

    x -= traj.gamma * direction;
    require_finite(x, "dcgd", k);
    record_point(traj, p, k, x, per_round_floats * static_cast<double>(k),
                 opt.reference);
  }
  traj.final_iterate = std::move(x);
  return traj;
}

Trajectory run_diana(const FlixProblem& p, const CompressedOptions& opt) {
  if (opt.rounds < 0) throw std::invalid_argument("run_diana: rounds must be >= 0");
  require_positive_alpha(p);
  validate_specs(p, opt.specs);

  const int n = p.num_clients();
  std::vector<double> rates =
      opt.memory_rates.empty() ? default_memory_rates(opt.specs) : opt.memory_rates;
  if (static_cast<int>(rates.size()) != n) {
    throw std::invalid_argument("run_diana: need one memory rate per client");
  }
  for (int i = 0; i < n; ++i) {
    const double cap = 1.0 / (opt.specs[static_cast<std::size_t>(i)].omega() + 1.0);
    if (!(rates[static_cast<std::size_t>(i)] > 0.0 &&
          rates[static_cast<std::size_t>(i)] <= cap)) {
      throw std::invalid_argument("run_diana: memory rates must satisfy 0 < beta_i <= 1/(omega_i+1)");
    }
  }

  Trajectory traj;
  traj.algorithm = "diana";
  traj.init = opt.init.is_one_shot() ? "one_shot" : "vector";
  traj.seed = opt.seed;
  for (const CompressorSpec& s : opt.specs) traj.omegas.push_back(s.omega());
  traj.memory_rates = rates;
  traj.gamma = opt.stepsize.is_theoretical()
                   ? diana_theoretical_stepsize(p, opt.specs, rates)
                   : opt.stepsize.manual_gamma();

  double per_round_floats = 0.0;
  for (const CompressorSpec& s : opt.specs) per_round_floats += s.payload_floats();

  Eigen::VectorXd x = resolve_init(p, opt.init);
  record_point(traj, p, 0, x, 0.0, opt.reference);

  // h_i^0 = alpha_i grad f_i(T_i(x^0)); h tracks the fixed-order average.
  DianaState state;
  state.rates = rates;
  state.memories.resize(static_cast<std::size_t>(n));
  detail::for_each_index(n, [&](int i) {
    state.memories[static_cast<std::size_t>(i)] = flix_grad_client(p, i, x);
  });
  state.memory_avg = Eigen::VectorXd::Zero(p.dim());
  for (int i = 0; i < n; ++i) {
    state.memory_avg += state.memories[static_cast<std::size_t>(i)];
  }
  state.memory_avg /= static_cast<double>(n);

  std::vector<Eigen::VectorXd> residuals(static_cast<std::size_t>(n));
  for (long k = 1;
       k <= opt.rounds &&
       !(opt.stop_objective && traj.points.back().objective <= *opt.stop_objective);
       ++k) {
    detail::for_each_index(n, [&](int i) {
      Rng rng = Rng::for_client(opt.seed, i, k - 1);
      const Eigen::VectorXd delta =
          flix_grad_client(p, i, x) - state.memories[static_cast<std::size_t>(i)];
      residuals[static_cast<std::size_t>(i)] =
          compress(opt.specs[static_cast<std::size_t>(i)], delta, rng);
    });

    Eigen::VectorXd residual_avg = Eigen::VectorXd::Zero(p.dim());
    Eigen::VectorXd memory_update = Eigen::VectorXd::Zero(p.dim());
    for (int i = 0; i < n; ++i) {
      residual_avg += residuals[static_cast<std::size_t>(i)];
      memory_update += state.rates[static_cast<std::size_t>(i)] *
                       residuals[static_cast<std::size_t>(i)];
    }
    residual_avg /= static_cast<double>(n);
    memory_update /= static_cast<double>(n);

    x -= traj.gamma * (state.memory_avg + residual_avg);
    require_finite(x, "diana", k);

    for (int i = 0; i < n; ++i) {
      state.memories[static_cast<std::size_t>(i)] +=
          state.rates[static_cast<std::size_t>(i)] *
          residuals[static_cast<std::size_t>(i)];
    }
    state.memory_avg += memory_update;

    if (opt.check_memory_drift) state.check_consistency();

    record_point(traj, p, k, x, per_round_floats * static_cast<double>(k),
                 opt.reference);
  }
  traj.final_iterate = std::move(x);
  return traj;
}

}  // namespace flix
