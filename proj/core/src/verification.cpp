#include "flix/verification.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "flix/data_io.hpp"
#include "flix/errors.hpp"
#include "flix/rng.hpp"

namespace flix {

namespace {

// Absolute slack covering evaluation roundoff of f~(x) - f~*; the bounds
// themselves are asserted exactly.
double gap_noise_floor(double f_star) {
  return 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(f_star));
}

const QuadraticObjective* as_quadratic(const ClientObjective& obj) {
  return dynamic_cast<const QuadraticObjective*>(&obj);
}

bool all_quadratic(const FlixProblem& p) {
  for (int i = 0; i < p.num_clients(); ++i) {
    if (as_quadratic(p.client(i)) == nullptr) return false;
  }
  return true;
}

}  // namespace

Eigen::VectorXd quad_flix_minimizer(const FlixProblem& p) {
  if (!all_quadratic(p)) {
    throw std::invalid_argument("quad_flix_minimizer: all clients must be quadratic");
  }
  const int d = p.dim();
  Eigen::MatrixXd system = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < p.num_clients(); ++i) {
    const auto* quad = as_quadratic(p.client(i));
    const double a2 = p.alpha()[i] * p.alpha()[i];
    system += a2 * quad->matrix();
    rhs += a2 * (quad->matrix() * p.local_model(i));
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      ldlt.vectorD().minCoeff() <= 0.0) {
    throw std::runtime_error("quad_flix_minimizer: singular system (is every alpha zero?)");
  }
  return ldlt.solve(rhs);
}

ReferenceOptimum high_precision_optimum(const FlixProblem& p, double tol,
                                        long max_iters) {
  if (p.alpha().all_zero()) {
    throw std::invalid_argument(
        "high_precision_optimum: gradient is identically zero for all-zero alpha");
  }
  ReferenceOptimum ref;
  if (all_quadratic(p)) {
    ref.x_star = quad_flix_minimizer(p);
  } else {
    const AggregateConstants agg = aggregate_constants(p);
    if (!(agg.mu_alpha > 0.0)) {
      throw std::invalid_argument(
          "high_precision_optimum: needs mu_alpha > 0 or quadratic clients");
    }
    const double gamma = 1.0 / agg.L_alpha;
    Eigen::VectorXd x = one_shot_average(p).x_avg;
    Eigen::VectorXd grad = flix_grad(p, x);
    long iter = 0;
    while (grad.norm() > tol) {
      if (iter++ >= max_iters) {
        throw ConvergenceFailure("high_precision_optimum did not converge", iter,
                                 grad.norm());
      }
      x -= gamma * grad;
      grad = flix_grad(p, x);
    }
    ref.x_star = std::move(x);
  }
  ref.f_star = flix_value(p, ref.x_star);
  ref.certificate = flix_grad(p, ref.x_star).norm();
  return ref;
}

double check_quad_finetune(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                           const Eigen::VectorXd& x0, double gamma, int steps) {
  if (steps < 0) throw std::invalid_argument("check_quad_finetune: steps must be >= 0");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0) {
    throw std::invalid_argument("check_quad_finetune: A must be positive definite");
  }
  if (!(gamma > 0.0) || gamma > 1.0 / eig.eigenvalues().maxCoeff()) {
    throw std::invalid_argument("check_quad_finetune: need 0 < gamma <= 1/lambda_max(A)");
  }

  Eigen::VectorXd iterate = x0;
  for (int t = 0; t < steps; ++t) iterate -= gamma * (A * iterate - b);

  const Eigen::VectorXd x_min = Eigen::LLT<Eigen::MatrixXd>(A).solve(b);
  const int d = static_cast<int>(A.rows());
  const Eigen::MatrixXd contraction = Eigen::MatrixXd::Identity(d, d) - gamma * A;
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(d, d);
  for (int t = 0; t < steps; ++t) power = power * contraction;
  const Eigen::VectorXd closed_form =
      (Eigen::MatrixXd::Identity(d, d) - power) * x_min + power * x0;

  return (iterate - closed_form).cwiseAbs().maxCoeff();
}

DgdRateReport check_dgd_rate(const FlixProblem& p, const Trajectory& traj,
                             const ReferenceOptimum& ref) {
  const AggregateConstants agg = aggregate_constants(p);
  const HeterogeneityConstants het = one_shot_average(p);
  const double noise = gap_noise_floor(ref.f_star);

  const double rate_general = 1.0 - agg.mu_alpha / agg.L_alpha;
  const double alpha_max = p.alpha().max();
  const double general_init = alpha_max * alpha_max * agg.L_hat * het.D / 2.0;

  DgdRateReport report;
  const std::optional<double> beta = p.alpha().equal_value();
  report.has_equal_alpha = beta.has_value();
  const double rate_equal = 1.0 - agg.mu_hat / agg.L_hat;
  const double equal_init =
      beta ? (*beta) * (*beta) * agg.L_hat * het.V / 2.0 : 0.0;

  if (traj.points.empty()) return report;
  const double gap0 = traj.points.front().objective - ref.f_star;

  double pow_general = 1.0;
  double pow_equal = 1.0;
  for (std::size_t k = 0; k < traj.points.size(); ++k) {
    const double gap = traj.points[k].objective - ref.f_star;
    if (report.pointwise_ok && gap > pow_general * gap0 + noise) {
      report.pointwise_ok = false;
      report.pointwise_violation = traj.points[k].round;
    }
    if (report.general_ok && gap > pow_general * general_init + noise) {
      report.general_ok = false;
      report.general_violation = traj.points[k].round;
    }
    if (report.has_equal_alpha && report.equal_alpha_ok &&
        gap > pow_equal * equal_init + noise) {
      report.equal_alpha_ok = false;
      report.equal_alpha_violation = traj.points[k].round;
    }
    pow_general *= rate_general;
    pow_equal *= rate_equal;
  }
  return report;
}

double dcgd_floor(const FlixProblem& p, const std::vector<CompressorSpec>& specs,
                  double gamma, const ReferenceOptimum& ref) {
  if (static_cast<int>(specs.size()) != p.num_clients()) {
    throw std::invalid_argument("dcgd_floor: need one compressor per client");
  }
  const double mu_alpha = aggregate_constants(p).mu_alpha;
  if (!(mu_alpha > 0.0)) {
    throw std::invalid_argument("dcgd_floor: needs mu_alpha > 0");
  }
  const double n = static_cast<double>(p.num_clients());
  double sum = 0.0;
  for (int i = 0; i < p.num_clients(); ++i) {
    sum += specs[static_cast<std::size_t>(i)].omega() *
           flix_grad_client(p, i, ref.x_star).squaredNorm();
  }
  return 2.0 * gamma * sum / (mu_alpha * n * n);
}

double estimate_smoothness(const FlixProblem& p, int samples, std::uint64_t seed) {
  if (samples < 2) throw std::invalid_argument("estimate_smoothness: samples must be >= 2");
  double scale = 1.0;
  for (int i = 0; i < p.num_clients(); ++i) {
    scale = std::max(scale, p.local_model(i).norm());
  }
  Rng rng(seed);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd x(p.dim());
    Eigen::VectorXd y(p.dim());
    for (int j = 0; j < p.dim(); ++j) {
      x[j] = scale * rng.normal();
      y[j] = scale * rng.normal();
    }
    const double dist = (x - y).norm();
    if (dist == 0.0) continue;
    const double ratio = (flix_grad(p, x) - flix_grad(p, y)).norm() / dist;
    if (ratio > worst) worst = ratio;
  }
  return worst;
}

long rounds_to_gap(const Trajectory& traj, double f_star, double threshold) {
  for (const TrajectoryPoint& pt : traj.points) {
    if (pt.objective - f_star <= threshold) return pt.round;
  }
  return -1;
}

FlixProblem make_synthetic_logistic_problem(int clients, int dim, int per_client,
                                            double lambda, double mean_shift,
                                            double beta, std::uint64_t seed,
                                            double feature_scale) {
  SyntheticLogisticConfig cfg;
  cfg.clients = clients;
  cfg.dim = dim;
  cfg.per_client = per_client;
  cfg.lambda = lambda;
  cfg.mean_shift = mean_shift;
  cfg.feature_scale = feature_scale;
  cfg.seed = seed;
  std::vector<ObjectivePtr> objectives = gen_synthetic(cfg);
  std::vector<Eigen::VectorXd> locals;
  locals.reserve(objectives.size());
  for (const ObjectivePtr& obj : objectives) locals.push_back(solve_local(*obj));
  return FlixProblem(std::move(objectives), AlphaVector::constant(clients, beta),
                     std::move(locals));
}

FlixProblem make_synthetic_quadratic_problem(int clients, int dim,
                                             double spectrum_min,
                                             double spectrum_max, double beta,
                                             std::uint64_t seed) {
  SyntheticQuadraticConfig cfg;
  cfg.clients = clients;
  cfg.dim = dim;
  cfg.spectrum_min = spectrum_min;
  cfg.spectrum_max = spectrum_max;
  cfg.seed = seed;
  std::vector<ObjectivePtr> objectives = gen_synthetic(cfg);
  std::vector<Eigen::VectorXd> locals;
  locals.reserve(objectives.size());
  for (const ObjectivePtr& obj : objectives) locals.push_back(solve_local(*obj));
  return FlixProblem(std::move(objectives), AlphaVector::constant(clients, beta),
                     std::move(locals), 1e-9);
}

FlixProblem make_two_quadratic_problem(double beta) {
  Eigen::MatrixXd a1(2, 2);
  a1 << 3.0, 0.0, 0.0, 1.0;
  Eigen::MatrixXd a2(2, 2);
  a2 << 1.0, 0.0, 0.0, 2.0;
  Eigen::VectorXd x1(2), x2(2);
  x1 << 1.0, 1.0;
  x2 << -1.0, -1.0;
  std::vector<ObjectivePtr> objectives = {
      std::make_shared<QuadraticObjective>(a1, a1 * x1),
      std::make_shared<QuadraticObjective>(a2, a2 * x2)};
  std::vector<Eigen::VectorXd> locals = {x1, x2};
  return FlixProblem(std::move(objectives), AlphaVector::constant(2, beta),
                     std::move(locals), 1e-9);
}

namespace {

CheckResult make_result(std::string name, double measured, double bound,
                        std::string detail = {}) {
  CheckResult r;
  r.name = std::move(name);
  r.measured = measured;
  r.bound = bound;
  r.passed = measured <= bound;
  r.detail = std::move(detail);
  return r;
}

void append_compressor_checks(std::vector<CheckResult>& out, std::uint64_t seed) {
  const int d = 50;
  const int k = 5;
  const CompressorSpec spec = CompressorSpec::rand_k(d, k);
  const double omega = spec.omega();

  Rng source(seed ^ 0x5eedc0ffeeULL);
  Eigen::VectorXd v(d);
  for (int j = 0; j < d; ++j) v[j] = source.normal();

  const int draws = 20000;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd second = Eigen::VectorXd::Zero(d);
  double err_sq = 0.0;
  double norm_sq = 0.0;
  Rng rng(seed ^ 0xc0de5eedULL);
  for (int t = 0; t < draws; ++t) {
    const Eigen::VectorXd c = compress(spec, v, rng);
    mean += c;
    second += c.cwiseProduct(c);
    err_sq += (c - v).squaredNorm();
    norm_sq += c.squaredNorm();
  }
  mean /= draws;
  second /= draws;
  err_sq /= draws;
  norm_sq /= draws;

  double worst_sigma = 0.0;
  for (int j = 0; j < d; ++j) {
    const double var = std::max(second[j] - mean[j] * mean[j], 0.0);
    const double se = std::sqrt(var / draws);
    if (se == 0.0) continue;
    worst_sigma = std::max(worst_sigma, std::abs(mean[j] - v[j]) / se);
  }
  // Simultaneous bound over all d coordinates; 5 sigma keeps the false-alarm
  // rate negligible for any seed while real bias sits hundreds of sigma out.
  out.push_back(make_result("compressor_unbiased", worst_sigma, 5.0,
                            "max per-coordinate |mean - v| in standard errors"));
  out.push_back(make_result("compressor_variance_bound", err_sq,
                            omega * v.squaredNorm() * 1.05,
                            "mean ||C(v)-v||^2 vs omega ||v||^2 (5% MC slack)"));
  out.push_back(make_result("compressor_second_moment", norm_sq,
                            (1.0 + omega) * v.squaredNorm() * 1.05,
                            "mean ||C(v)||^2 vs (1+omega)||v||^2 (5% MC slack)"));
}

}  // namespace

std::vector<CheckResult> run_check_suite(std::uint64_t seed,
                                         double dgd_stepsize_scale) {
  std::vector<CheckResult> out;
  Rng rng(seed);

  // H fine-tuning GD steps on a quadratic equal the matrix-weighted
  // average of x0 and the local minimizer.
  {
    SyntheticQuadraticConfig cfg;
    cfg.clients = 1;
    cfg.dim = 5;
    cfg.spectrum_min = 0.5;
    cfg.spectrum_max = 4.0;
    cfg.seed = seed;
    const std::vector<ObjectivePtr> generated = gen_synthetic(cfg);
    const auto* quad = as_quadratic(*generated[0]);
    Eigen::VectorXd x0(5);
    for (int j = 0; j < 5; ++j) x0[j] = rng.normal();
    const double dev = check_quad_finetune(quad->matrix(), quad->linear_term(), x0,
                                           1.0 / quad->constants().L, 20);
    out.push_back(make_result("quad_finetune_closed_form", dev, 1e-10,
                              "max coordinate deviation, H=20"));
  }

  // Deployed variance scales exactly as (1-beta)^2.
  {
    FlixProblem base = make_synthetic_quadratic_problem(20, 10, 1.0, 1.0, 1.0, seed + 1);
    Eigen::VectorXd x(10);
    for (int j = 0; j < 10; ++j) x[j] = rng.normal();
    double model_variance = 0.0;
    {
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(10);
      for (int i = 0; i < 20; ++i) mean += base.local_model(i);
      mean /= 20.0;
      for (int i = 0; i < 20; ++i) {
        model_variance += (base.local_model(i) - mean).squaredNorm();
      }
      model_variance /= 20.0;
    }
    double worst_rel = 0.0;
    for (int g = 0; g <= 10; ++g) {
      const double beta = g / 10.0;
      const FlixProblem pb = base.with_alpha(AlphaVector::constant(20, beta));
      const double lhs = deployed_variance(pb, x);
      const double rhs = (1.0 - beta) * (1.0 - beta) * model_variance;
      const double rel = std::abs(lhs - rhs) / std::max({lhs, rhs, 1e-30});
      worst_rel = std::max(worst_rel, rel);
    }
    out.push_back(make_result("deployed_variance_identity", worst_rel, 1e-12,
                              "max relative deviation over beta grid 0..1"));
  }

  // The aggregated smoothness constant is honest.
  {
    FlixProblem p = make_synthetic_logistic_problem(10, 20, 30, 0.1, 1.0, 0.7, seed + 2);
    const double estimate = estimate_smoothness(p, 200, seed + 3);
    const double L_alpha = aggregate_constants(p).L_alpha;
    out.push_back(make_result("smoothness_estimate_vs_L_alpha", estimate,
                              L_alpha * (1.0 + 1e-9),
                              "max gradient-Lipschitz ratio over 200 pairs"));
  }

  // One-shot averaging at the equal-alpha threshold.
  {
    FlixProblem base = make_synthetic_quadratic_problem(6, 4, 0.5, 3.0, 1.0, seed + 4);
    const double epsilon = 1e-3;
    const AggregateConstants agg = aggregate_constants(base);
    const double V = one_shot_average(base).V;  // beta-free for equal alpha
    const double beta = std::min(1.0, std::sqrt(2.0 * epsilon / (agg.L_hat * V)));
    const FlixProblem p = base.with_alpha(AlphaVector::constant(6, beta));
    const HeterogeneityConstants het = one_shot_average(p);
    const ReferenceOptimum ref = high_precision_optimum(p);
    out.push_back(make_result("one_shot_epsilon_minimizer",
                              flix_value(p, het.x_avg) - ref.f_star, epsilon,
                              "f~(x_avg) - f~* at the threshold beta"));
  }

  // Isotropic quadratics: x_avg is the exact minimizer.
  {
    std::vector<ObjectivePtr> objectives;
    std::vector<Eigen::VectorXd> locals;
    Rng gen(seed + 5);
    for (int i = 0; i < 5; ++i) {
      const double L = 0.5 + gen.uniform01() * 3.0;
      Eigen::VectorXd xi(3);
      for (int j = 0; j < 3; ++j) xi[j] = gen.normal();
      const Eigen::MatrixXd A = L * Eigen::MatrixXd::Identity(3, 3);
      objectives.push_back(std::make_shared<QuadraticObjective>(A, A * xi));
      locals.push_back(xi);
    }
    FlixProblem p(std::move(objectives), AlphaVector::constant(5, 0.6),
                  std::move(locals), 1e-9);
    const Eigen::VectorXd x_avg = one_shot_average(p).x_avg;
    const Eigen::VectorXd x_star = quad_flix_minimizer(p);
    out.push_back(make_result("one_shot_isotropic_exact", (x_avg - x_star).norm(),
                              1e-10, "||x_avg - x*|| for A_i = L_i I"));
  }

  // DGD linear rate, pointwise along the trajectory.
  {
    FlixProblem p = make_synthetic_logistic_problem(8, 20, 25, 0.1, 1.0, 0.5, seed + 6);
    const ReferenceOptimum ref = high_precision_optimum(p);
    DgdOptions opt;
    opt.stepsize = StepsizeMode::manual(dgd_stepsize_scale * dgd_theoretical_stepsize(p));
    opt.rounds = 300;
    const Trajectory traj = run_dgd(p, opt);
    const DgdRateReport rate = check_dgd_rate(p, traj, ref);
    const double violations = (rate.pointwise_ok ? 0.0 : 1.0) +
                              (rate.general_ok ? 0.0 : 1.0) +
                              (rate.equal_alpha_ok ? 0.0 : 1.0);
    char detail[128];
    std::snprintf(detail, sizeof(detail),
                  "first violations: pointwise=%ld general=%ld equal_alpha=%ld",
                  rate.pointwise_violation, rate.general_violation,
                  rate.equal_alpha_violation);
    out.push_back(make_result("dgd_rate_bounds", violations, 0.0, detail));

    // Gradient and function bounds through the local models.
    double worst_grad = 0.0;
    double worst_func = -std::numeric_limits<double>::infinity();
    double local_value_avg = 0.0;
    for (int i = 0; i < p.num_clients(); ++i) {
      local_value_avg += p.client(i).value(p.local_model(i));
    }
    local_value_avg /= p.num_clients();
    Rng sampler(seed + 7);
    for (int s = 0; s < 25; ++s) {
      Eigen::VectorXd x(p.dim());
      for (int j = 0; j < p.dim(); ++j) x[j] = 2.0 * sampler.normal();
      double grad_bound = 0.0;
      double quad_term = 0.0;
      for (int i = 0; i < p.num_clients(); ++i) {
        const double a2 = p.alpha()[i] * p.alpha()[i];
        const double dist = (x - p.local_model(i)).norm();
        grad_bound += a2 * p.constants(i).L * dist;
        quad_term += a2 * p.constants(i).L * dist * dist;
      }
      grad_bound /= p.num_clients();
      quad_term /= 2.0 * p.num_clients();
      worst_grad = std::max(worst_grad,
                            flix_grad(p, x).norm() - grad_bound * (1.0 + 1e-9));
      worst_func = std::max(worst_func, flix_value(p, x) -
                                            (local_value_avg + quad_term) *
                                                (1.0 + 1e-9));
    }
    out.push_back(make_result("gradient_bound_via_local_models", worst_grad, 0.0,
                              "||grad f~(x)|| - (1/n) sum alpha_i^2 L_i ||x - x_i||"));
    out.push_back(make_result("function_bound_via_local_models", worst_func, 0.0,
                              "f~(x) - [avg f_i(x_i) + quadratic envelope]"));

    // Distance-to-optimum bounds on the same strongly convex problem.
    const AggregateConstants agg = aggregate_constants(p);
    double max_L = 0.0;
    double max_pairwise = 0.0;
    double avg_dist_to_star = 0.0;
    for (int i = 0; i < p.num_clients(); ++i) {
      max_L = std::max(max_L, p.constants(i).L);
      avg_dist_to_star += (p.local_model(i) - ref.x_star).squaredNorm();
      for (int j = i + 1; j < p.num_clients(); ++j) {
        max_pairwise = std::max(
            max_pairwise, (p.local_model(i) - p.local_model(j)).squaredNorm());
      }
    }
    avg_dist_to_star /= p.num_clients();
    out.push_back(make_result("average_distance_bound", avg_dist_to_star,
                              (max_L / agg.mu_hat) * max_pairwise * (1.0 + 1e-9),
                              "avg ||x_i - x*||^2 vs (max L_i / mu_hat) max pairwise"));

    double worst_dist = 0.0;
    for (int s = 0; s < 10; ++s) {
      Eigen::VectorXd x0(p.dim());
      for (int j = 0; j < p.dim(); ++j) x0[j] = 2.0 * sampler.normal();
      double rhs = 0.0;
      for (int i = 0; i < p.num_clients(); ++i) {
        rhs += p.constants(i).L * (x0 - p.local_model(i)).squaredNorm();
      }
      rhs /= agg.mu_hat * p.num_clients();
      worst_dist = std::max(worst_dist, (x0 - ref.x_star).squaredNorm() -
                                            rhs * (1.0 + 1e-9));
    }
    out.push_back(make_result("distance_to_optimum_bound", worst_dist, 0.0,
                              "||x0 - x*||^2 - (1/mu_hat) avg L_i ||x0 - x_i||^2"));
  }

  // DCGD stalls inside its neighborhood; DIANA does not.
  {
    FlixProblem p = make_synthetic_logistic_problem(8, 10, 20, 0.1, 1.0, 0.5, seed + 8);
    const ReferenceOptimum ref = high_precision_optimum(p);
    std::vector<CompressorSpec> specs(8, CompressorSpec::rand_k(10, 2));
    const double gamma = dcgd_theoretical_stepsize(p, specs);
    const double floor = dcgd_floor(p, specs, gamma, ref);

    double mean_gap = 0.0;
    const int trials = 5;
    for (int t = 0; t < trials; ++t) {
      CompressedOptions opt;
      opt.specs = specs;
      opt.rounds = 400;
      opt.seed = seed + 100 + static_cast<std::uint64_t>(t);
      const Trajectory traj = run_dcgd(p, opt);
      mean_gap += traj.points.back().objective - ref.f_star;
    }
    mean_gap /= trials;
    out.push_back(make_result("dcgd_gap_within_floor", mean_gap, floor,
                              "mean terminal gap over 5 seeds vs sigma floor"));

    CompressedOptions opt;
    opt.specs = specs;
    opt.rounds = 3000;
    opt.seed = seed + 200;
    opt.check_memory_drift = true;
    const Trajectory diana = run_diana(p, opt);
    const double diana_gap = diana.points.back().objective - ref.f_star;
    out.push_back(make_result("diana_breaks_dcgd_floor", diana_gap,
                              std::min(1e-8, mean_gap),
                              "DIANA terminal gap vs min(1e-8, DCGD stall)"));
  }

  append_compressor_checks(out, seed);

  // Budget ladder: every rung delivers epsilon within its promised count.
  {
    const double epsilon = 1e-3;
    const FlixProblem base = make_two_quadratic_problem(1.0);
    const CommBudget budget = comm_budget(base, epsilon);
    double worst_excess = -1.0;
    std::string detail = "betas:";
    for (double beta :
         {budget.A / 2.0, budget.A, std::min(1.0, budget.A * std::pow(budget.q, 1.5)),
          std::min(1.0, budget.A * std::pow(budget.q, 3.0)), 1.0}) {
      const FlixProblem p = base.with_alpha(AlphaVector::constant(2, beta));
      const long promised = budget.communications(beta);
      const ReferenceOptimum ref = high_precision_optimum(p);
      DgdOptions opt;
      opt.rounds = promised > 0 ? promised - 1 : 0;  // 1 comm buys x_avg
      const Trajectory traj = run_dgd(p, opt);
      const double gap = traj.points.back().objective - ref.f_star;
      worst_excess = std::max(worst_excess, gap - epsilon);
      detail += " " + std::to_string(beta);
    }
    out.push_back(make_result("budget_ladder_honored", worst_excess, 0.0, detail));
  }

  return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
  for (const CheckResult& r : results) {
    if (!r.passed) return false;
  }
  return true;
}

}  // namespace flix
