#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "flix/problem.hpp"
#include "flix/rng.hpp"
#include "flix/verification.hpp"

#include "test_util.hpp"

using flix::AlphaVector;
using flix::FlixProblem;
using flix::Rng;

namespace {

// f1 = (x-1)^2/2, f2 = (x+1)^2/2; the standing 1-D pair with
// f~(x) = beta^2 (x^2 + 1) / 2 for equal alpha = beta.
FlixProblem two_scalar_quadratics(double beta) {
  Eigen::MatrixXd a(1, 1);
  a << 1.0;
  Eigen::VectorXd b1(1), b2(1);
  b1 << 1.0;
  b2 << -1.0;
  std::vector<flix::ObjectivePtr> clients = {
      std::make_shared<flix::QuadraticObjective>(a, b1, 0.5),
      std::make_shared<flix::QuadraticObjective>(a, b2, 0.5)};
  std::vector<Eigen::VectorXd> locals = {b1, b2};
  return FlixProblem(std::move(clients), AlphaVector::constant(2, beta),
                     std::move(locals), 1e-12);
}

}  // namespace

TEST_CASE("alpha vector validation") {
  Eigen::VectorXd bad(2);
  bad << 0.5, 1.5;
  CHECK_THROWS_AS(AlphaVector{bad}, std::invalid_argument);
  CHECK(AlphaVector::constant(3, 0.25).equal_value() == 0.25);
  Eigen::VectorXd mixed(2);
  mixed << 0.2, 0.3;
  CHECK_FALSE(AlphaVector(mixed).equal_value().has_value());
}

TEST_CASE("problem construction enforces the local-model certificates") {
  Eigen::MatrixXd a(1, 1);
  a << 2.0;
  Eigen::VectorXd b(1);
  b << 4.0;
  std::vector<flix::ObjectivePtr> clients = {
      std::make_shared<flix::QuadraticObjective>(a, b)};
  Eigen::VectorXd wrong(1);
  wrong << 1.0;  // true minimizer is 2
  CHECK_THROWS_AS(FlixProblem(clients, AlphaVector::constant(1, 0.5), {wrong}),
                  std::invalid_argument);
}

TEST_CASE("deploy mixes the global and local models") {
  FlixProblem p = two_scalar_quadratics(0.5);
  Eigen::VectorXd x(1);
  x << 0.0;
  CHECK(flix::deploy(p, 0, x)[0] == doctest::Approx(0.5));
  CHECK(flix::deploy(p, 1, x)[0] == doctest::Approx(-0.5));

  FlixProblem full = two_scalar_quadratics(1.0);
  Eigen::VectorXd any(1);
  any << 3.25;
  CHECK(bits_equal(flix::deploy(full, 0, any), any));

  FlixProblem none = two_scalar_quadratics(0.0);
  CHECK(flix::deploy(none, 1, any)[0] == -1.0);

  CHECK_THROWS_AS(flix::deploy(p, 2, x), std::invalid_argument);
}

TEST_CASE("two scalar quadratics match the symbolic expansion") {
  const double beta = 0.5;
  FlixProblem p = two_scalar_quadratics(beta);
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd x(1);
    x << 3.0 * rng.normal();
    const double expected = beta * beta * (x[0] * x[0] + 1.0) / 2.0;
    CHECK(flix::flix_value(p, x) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(flix::flix_grad(p, x)[0] ==
          doctest::Approx(beta * beta * x[0]).epsilon(1e-12));
  }
  CHECK(flix::flix_grad(p, Eigen::VectorXd::Zero(1)).norm() == 0.0);
}

TEST_CASE("alpha = 1 reduces to the plain ERM average") {
  FlixProblem p = flix::make_synthetic_quadratic_problem(5, 3, 0.5, 2.0, 1.0, 71);
  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    Eigen::VectorXd x(3);
    for (int j = 0; j < 3; ++j) x[j] = rng.normal();
    double erm = 0.0;
    for (int i = 0; i < p.num_clients(); ++i) erm += p.client(i).value(x);
    erm /= p.num_clients();
    CHECK(flix::flix_value(p, x) == doctest::Approx(erm).epsilon(1e-12));
  }
}

TEST_CASE("alpha = 0 freezes the objective") {
  FlixProblem p = two_scalar_quadratics(0.0);
  Rng rng(4);
  for (int t = 0; t < 10; ++t) {
    Eigen::VectorXd x(1);
    x << 10.0 * rng.normal();
    CHECK(flix::flix_grad(p, x).norm() == 0.0);
    // Constant at the mean of f_i(x_i), which is 0 for this pair.
    CHECK(flix::flix_value(p, x) == doctest::Approx(0.0));
  }
}

TEST_CASE("aggregate constants") {
  // alpha = 1: L_alpha = L_hat, mu_alpha = mu_hat.
  FlixProblem unit = flix::make_synthetic_quadratic_problem(4, 3, 0.5, 2.0, 1.0, 5);
  const flix::AggregateConstants agg1 = flix::aggregate_constants(unit);
  CHECK(agg1.L_alpha == doctest::Approx(agg1.L_hat).epsilon(1e-14));
  CHECK(agg1.mu_alpha == doctest::Approx(agg1.mu_hat).epsilon(1e-14));

  // alpha = beta: L_alpha = beta^2 L_hat.
  const FlixProblem scaled = unit.with_alpha(AlphaVector::constant(4, 0.3));
  const flix::AggregateConstants agg2 = flix::aggregate_constants(scaled);
  CHECK(agg2.L_alpha == doctest::Approx(0.09 * agg2.L_hat).epsilon(1e-12));

  // n=2, L=(1,3), alpha=(0.5,1) -> L_alpha = (0.25*1 + 1*3)/2 = 1.625.
  Eigen::MatrixXd a1 = Eigen::MatrixXd::Identity(1, 1);
  Eigen::MatrixXd a3 = 3.0 * Eigen::MatrixXd::Identity(1, 1);
  std::vector<flix::ObjectivePtr> clients = {
      std::make_shared<flix::QuadraticObjective>(a1, Eigen::VectorXd::Zero(1)),
      std::make_shared<flix::QuadraticObjective>(a3, Eigen::VectorXd::Zero(1))};
  Eigen::VectorXd alpha(2);
  alpha << 0.5, 1.0;
  FlixProblem mixed(clients, AlphaVector(alpha),
                    {Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)}, 1e-12);
  CHECK(flix::aggregate_constants(mixed).L_alpha == doctest::Approx(1.625));
}

TEST_CASE("one-shot average on hand problems") {
  // Equal alpha, equal L: uniform mean of the local models.
  FlixProblem pair = two_scalar_quadratics(0.5);
  const flix::HeterogeneityConstants het = flix::one_shot_average(pair);
  CHECK(het.weights.sum() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(het.x_avg[0] == doctest::Approx(0.0));
  CHECK(het.V == doctest::Approx(1.0));  // (1/2)*1 + (1/2)*1
  CHECK(het.D == doctest::Approx(4.0));  // squared max pairwise distance

  FlixProblem zero = two_scalar_quadratics(0.0);
  CHECK_THROWS_AS(flix::one_shot_average(zero), std::invalid_argument);
}

TEST_CASE("one-shot average equals the exact minimizer for isotropic clients") {
  Rng rng(6);
  std::vector<flix::ObjectivePtr> clients;
  std::vector<Eigen::VectorXd> locals;
  for (int i = 0; i < 6; ++i) {
    const double L = 0.5 + 2.0 * rng.uniform01();
    Eigen::VectorXd xi(4);
    for (int j = 0; j < 4; ++j) xi[j] = rng.normal();
    const Eigen::MatrixXd A = L * Eigen::MatrixXd::Identity(4, 4);
    clients.push_back(std::make_shared<flix::QuadraticObjective>(A, A * xi));
    locals.push_back(xi);
  }
  Eigen::VectorXd alpha(6);
  for (int i = 0; i < 6; ++i) alpha[i] = 0.2 + 0.1 * i;
  FlixProblem p(std::move(clients), AlphaVector(alpha), std::move(locals), 1e-10);
  const Eigen::VectorXd x_avg = flix::one_shot_average(p).x_avg;
  const Eigen::VectorXd x_star = flix::quad_flix_minimizer(p);
  CHECK((x_avg - x_star).norm() <= 1e-10);
  CHECK(flix::flix_grad(p, x_star).norm() <= 1e-10);
}

TEST_CASE("deployed variance identity over the whole beta grid") {
  FlixProblem base = flix::make_synthetic_quadratic_problem(12, 6, 0.5, 2.0, 1.0, 13);
  Rng rng(14);
  Eigen::VectorXd x(6);
  for (int j = 0; j < 6; ++j) x[j] = rng.normal();

  const FlixProblem local_only = base.with_alpha(AlphaVector::constant(12, 0.0));
  const double model_variance = flix::deployed_variance(local_only, x);

  for (int g = 0; g <= 10; ++g) {
    const double beta = g / 10.0;
    const FlixProblem p = base.with_alpha(AlphaVector::constant(12, beta));
    const double lhs = flix::deployed_variance(p, x);
    const double rhs = (1.0 - beta) * (1.0 - beta) * model_variance;
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max({lhs, rhs, 1e-30}));
  }
  CHECK(flix::deployed_variance(base, x) == 0.0);  // beta = 1 exactly
}

TEST_CASE("flix objective satisfies the aggregated smoothness and convexity") {
  FlixProblem p = flix::make_synthetic_logistic_problem(6, 8, 15, 0.2, 1.0, 0.6, 15);
  const flix::AggregateConstants agg = flix::aggregate_constants(p);
  Rng rng(16);
  for (int t = 0; t < 100; ++t) {
    Eigen::VectorXd x(8), y(8);
    for (int j = 0; j < 8; ++j) {
      x[j] = 2.0 * rng.normal();
      y[j] = 2.0 * rng.normal();
    }
    const Eigen::VectorXd gx = flix::flix_grad(p, x);
    const Eigen::VectorXd gy = flix::flix_grad(p, y);
    const double dist = (x - y).norm();
    CHECK((gx - gy).norm() <= agg.L_alpha * dist * (1.0 + 1e-9));
    CHECK(flix::flix_value(p, x) >=
          flix::flix_value(p, y) + gy.dot(x - y) +
              0.5 * agg.mu_alpha * dist * dist - 1e-10);
  }
}

TEST_CASE("gradient and function bounds through the local models") {
  FlixProblem p = flix::make_synthetic_logistic_problem(5, 6, 12, 0.1, 1.5, 0.8, 18);
  double local_avg = 0.0;
  for (int i = 0; i < p.num_clients(); ++i) {
    local_avg += p.client(i).value(p.local_model(i));
  }
  local_avg /= p.num_clients();

  Rng rng(19);
  for (int t = 0; t < 50; ++t) {
    Eigen::VectorXd x(6);
    for (int j = 0; j < 6; ++j) x[j] = 3.0 * rng.normal();
    double grad_bound = 0.0;
    double quad = 0.0;
    for (int i = 0; i < p.num_clients(); ++i) {
      const double a2 = p.alpha()[i] * p.alpha()[i];
      const double dist2 = (x - p.local_model(i)).squaredNorm();
      grad_bound += a2 * p.constants(i).L * std::sqrt(dist2);
      quad += a2 * p.constants(i).L * dist2;
    }
    grad_bound /= p.num_clients();
    quad /= 2.0 * p.num_clients();
    CHECK(flix::flix_grad(p, x).norm() <= grad_bound * (1.0 + 1e-9) + 1e-12);
    CHECK(flix::flix_value(p, x) <= (local_avg + quad) * (1.0 + 1e-9) + 1e-12);
  }
}

TEST_CASE("distance-to-optimum bound on a strongly convex equal-alpha problem") {
  FlixProblem p = flix::make_synthetic_logistic_problem(6, 6, 15, 0.2, 1.0, 0.5, 23);
  const flix::ReferenceOptimum ref = flix::high_precision_optimum(p);
  const double mu_hat = flix::aggregate_constants(p).mu_hat;
  Rng rng(24);
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd x0(6);
    for (int j = 0; j < 6; ++j) x0[j] = 3.0 * rng.normal();
    double rhs = 0.0;
    for (int i = 0; i < p.num_clients(); ++i) {
      rhs += p.constants(i).L * (x0 - p.local_model(i)).squaredNorm();
    }
    rhs /= mu_hat * p.num_clients();
    CHECK((x0 - ref.x_star).squaredNorm() <= rhs * (1.0 + 1e-9));
  }
}

TEST_CASE("communication budget ladder") {
  FlixProblem base = flix::make_two_quadratic_problem(1.0);
  const double epsilon = 1e-3;
  const flix::CommBudget budget = flix::comm_budget(base, epsilon);
  CHECK(budget.A > 0.0);
  CHECK(budget.q > 1.0);
  CHECK(std::isfinite(budget.q));
  CHECK(budget.hetero_alpha_bound > 0.0);

  CHECK(budget.communications(0.0) == 0);
  CHECK(budget.communications(budget.A / 2.0) == 1);
  CHECK(budget.communications(budget.A) == 1);
  // A q^{k-1} < beta <= A q^k -> k+1 communications.
  CHECK(budget.communications(budget.A * std::pow(budget.q, 0.5)) == 2);
  CHECK(budget.communications(budget.A * std::pow(budget.q, 1.0)) == 2);
  CHECK(budget.communications(budget.A * std::pow(budget.q, 1.5)) == 3);
  CHECK(budget.communications(budget.A * std::pow(budget.q, 2.5)) == 4);

  // Heterogeneous-alpha bound: gap at x_avg <= epsilon at alpha_max = bound.
  const double bound = std::min(1.0, budget.hetero_alpha_bound);
  const FlixProblem at_bound =
      base.with_alpha(AlphaVector::constant(2, bound));
  const flix::ReferenceOptimum ref = flix::high_precision_optimum(at_bound);
  const double gap =
      flix::flix_value(at_bound, flix::one_shot_average(at_bound).x_avg) - ref.f_star;
  CHECK(gap <= epsilon);

  CHECK_THROWS_AS(flix::comm_budget(base, 0.0), std::invalid_argument);

  // Unequal alpha is rejected.
  Eigen::VectorXd uneven(2);
  uneven << 0.2, 0.4;
  CHECK_THROWS_AS(flix::comm_budget(base.with_alpha(AlphaVector(uneven)), epsilon),
                  std::invalid_argument);
}

TEST_CASE("mu_hat = 0 is unsupported by the ladder") {
  FlixProblem p = flix::make_synthetic_logistic_problem(3, 4, 10, 0.0, 0.5, 0.5, 27);
  CHECK_THROWS_AS(flix::comm_budget(p, 1e-3), std::invalid_argument);
}

TEST_CASE("aggregate and heterogeneity constants satisfy their invariants") {
  Rng rng(97);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_int(8));
    Eigen::VectorXd alpha(n);
    for (int i = 0; i < n; ++i) alpha[i] = rng.uniform01();
    alpha[static_cast<int>(rng.uniform_int(n))] = 0.5;  // keep one positive
    FlixProblem p =
        flix::make_synthetic_quadratic_problem(n, 4, 0.3, 3.0, 1.0,
                                               1000 + static_cast<std::uint64_t>(trial))
            .with_alpha(AlphaVector(alpha));

    const flix::AggregateConstants agg = flix::aggregate_constants(p);
    CHECK(agg.mu_alpha <= agg.L_alpha * (1.0 + 1e-12));
    const double amax = p.alpha().max();
    CHECK(agg.L_alpha <= amax * amax * agg.L_hat * (1.0 + 1e-12));

    const flix::HeterogeneityConstants het = flix::one_shot_average(p);
    CHECK(het.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(het.weights.minCoeff() >= 0.0);
    CHECK(het.V <= het.D * (1.0 + 1e-12));
    CHECK(het.D > 0.0);  // distinct local models
  }

  // D = 0 iff all local models are equal.
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd shared(2);
  shared << 1.0, -2.0;
  std::vector<flix::ObjectivePtr> clients = {
      std::make_shared<flix::QuadraticObjective>(a, shared),
      std::make_shared<flix::QuadraticObjective>(a, shared)};
  FlixProblem equal(clients, AlphaVector::constant(2, 0.5), {shared, shared},
                    1e-12);
  const flix::HeterogeneityConstants het = flix::one_shot_average(equal);
  CHECK(het.D == 0.0);
  CHECK(het.V == 0.0);
}
