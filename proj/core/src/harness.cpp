#include "flix/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "flix/compression.hpp"
#include "flix/data_io.hpp"
#include "flix/errors.hpp"
#include "flix/solvers.hpp"
#include "flix/verification.hpp"

namespace flix {

namespace fs = std::filesystem;

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string bundle_path(const RunConfig& cfg) {
  return (fs::path(cfg.output_dir) / "local_models.bundle").string();
}

std::vector<ObjectivePtr> build_clients(const RunConfig& cfg) {
  if (cfg.problem_kind == "synthetic_logistic") {
    SyntheticLogisticConfig scfg;
    scfg.clients = cfg.clients;
    scfg.dim = cfg.dim;
    scfg.per_client = cfg.per_client;
    scfg.lambda = cfg.lambda;
    scfg.mean_shift = cfg.mean_shift;
    scfg.feature_scale = cfg.feature_scale;
    scfg.seed = cfg.seed;
    return gen_synthetic(scfg);
  }
  if (cfg.problem_kind == "synthetic_quadratic") {
    SyntheticQuadraticConfig scfg;
    scfg.clients = cfg.clients;
    scfg.dim = cfg.dim;
    scfg.spectrum_min = cfg.spectrum_min;
    scfg.spectrum_max = cfg.spectrum_max;
    scfg.seed = cfg.seed;
    return gen_synthetic(scfg);
  }
  // libsvm
  if (!fs::exists(cfg.libsvm_path) && !cfg.libsvm_url.empty()) {
    if (!fetch_dataset(cfg.libsvm_url, cfg.libsvm_path)) {
      throw std::invalid_argument("failed to fetch dataset from " + cfg.libsvm_url);
    }
  }
  const RawDataset ds = parse_libsvm_file(cfg.libsvm_path, cfg.dim);
  const PartitionSpec partition =
      partition_contiguous(ds.size(), static_cast<std::size_t>(cfg.clients));
  return make_logistic_clients(fold_labels(ds), partition, cfg.lambda);
}

struct LocalBundle {
  std::vector<Eigen::VectorXd> models;
  std::vector<ObjectiveConstants> constants;
  std::vector<double> certificates;
};

LocalBundle compute_local_bundle(const RunConfig& cfg,
                                 const std::vector<ObjectivePtr>& clients) {
  LocalBundle bundle;
  bundle.models.reserve(clients.size());
  for (const ObjectivePtr& obj : clients) {
    Eigen::VectorXd x = solve_local(*obj, cfg.local_tolerance, cfg.local_max_iters);
    bundle.certificates.push_back(obj->gradient(x).norm());
    bundle.constants.push_back(obj->constants());
    bundle.models.push_back(std::move(x));
  }
  return bundle;
}

void write_bundle(const std::string& path, const LocalBundle& bundle, int dim) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write bundle: " + tmp);
    out << "flix-local-bundle 1\n";
    out << "clients " << bundle.models.size() << " dim " << dim << "\n";
    for (std::size_t i = 0; i < bundle.models.size(); ++i) {
      out << "client " << i << " L " << fmt17(bundle.constants[i].L) << " mu "
          << fmt17(bundle.constants[i].mu) << " certificate "
          << fmt17(bundle.certificates[i]) << "\n";
      out << "x";
      for (Eigen::Index j = 0; j < bundle.models[i].size(); ++j) {
        out << ' ' << fmt17(bundle.models[i][j]);
      }
      out << "\n";
    }
  }
  fs::rename(tmp, path);
}

LocalBundle read_bundle(const std::string& path, std::size_t expect_clients,
                        int expect_dim) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open bundle: " + path);
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "flix-local-bundle" || version != 1) {
    throw std::runtime_error("unrecognized bundle format: " + path);
  }
  std::string word;
  std::size_t clients = 0;
  int dim = 0;
  in >> word >> clients >> word >> dim;
  if (clients != expect_clients || dim != expect_dim) {
    throw std::runtime_error("bundle does not match the configured problem: " + path);
  }
  LocalBundle bundle;
  for (std::size_t i = 0; i < clients; ++i) {
    std::size_t idx = 0;
    ObjectiveConstants c;
    double certificate = 0.0;
    in >> word >> idx;
    in >> word >> c.L >> word >> c.mu >> word >> certificate;
    Eigen::VectorXd x(dim);
    in >> word;  // "x"
    for (int j = 0; j < dim; ++j) in >> x[j];
    if (!in) throw std::runtime_error("truncated bundle: " + path);
    bundle.models.push_back(std::move(x));
    bundle.constants.push_back(c);
    bundle.certificates.push_back(certificate);
  }
  return bundle;
}

std::vector<int> resolve_k_grid(const RunConfig& cfg, int dim) {
  if (cfg.algorithm == "dgd" || cfg.compressor_kind == "identity") return {dim};
  if (cfg.compressor_kind == "rand_k") return {cfg.compressor_k};
  return k_sweep(dim, cfg.sweep_count);
}

std::string make_run_id(std::size_t index, const std::string& algorithm,
                        double beta, int k) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "run%04zu_%s_b%g_k%d", index, algorithm.c_str(),
                beta, k);
  return buf;
}

void write_metrics_csv(const std::string& path, const std::string& run_id,
                       const std::string& algorithm, double beta, int k,
                       const Trajectory& traj, double f_star) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write metrics CSV: " + path);
  out << "run_id,algorithm,beta,k,round,loss_gap,grad_norm_sq,"
         "avg_deploy_dist_sq,uplink_kfloats\n";
  for (const TrajectoryPoint& pt : traj.points) {
    out << run_id << ',' << algorithm << ',' << fmt17(beta) << ',' << k << ','
        << pt.round << ',' << fmt17(pt.objective - f_star) << ','
        << fmt17(pt.grad_norm_sq) << ',' << fmt17(pt.avg_deploy_dist_sq) << ','
        << fmt17(pt.uplink_floats / 1000.0) << "\n";
  }
}

AlphaVector alpha_for(const RunConfig& cfg, double beta) {
  if (!cfg.alpha_list.empty()) {
    Eigen::VectorXd values(static_cast<Eigen::Index>(cfg.alpha_list.size()));
    for (std::size_t i = 0; i < cfg.alpha_list.size(); ++i) {
      values[static_cast<Eigen::Index>(i)] = cfg.alpha_list[i];
    }
    return AlphaVector(values);
  }
  return AlphaVector::constant(cfg.clients, beta);
}

double beta_summary(const AlphaVector& alpha) {
  return alpha.values().mean();
}

}  // namespace

FlixProblem build_problem(const RunConfig& cfg, const AlphaVector& alpha) {
  std::vector<ObjectivePtr> clients = build_clients(cfg);
  const LocalBundle bundle = compute_local_bundle(cfg, clients);
  return FlixProblem(std::move(clients), alpha, bundle.models, cfg.local_tolerance);
}

int cmd_precompute_local(const RunConfig& cfg, std::ostream& log) {
  fs::create_directories(cfg.output_dir);
  const std::string path = bundle_path(cfg);
  try {
    const std::vector<ObjectivePtr> clients = build_clients(cfg);
    const LocalBundle bundle = compute_local_bundle(cfg, clients);
    write_bundle(path, bundle, clients.empty() ? 0 : clients[0]->dim());
    double worst = 0.0;
    for (double c : bundle.certificates) worst = std::max(worst, c);
    log << "wrote " << path << " (" << bundle.models.size()
        << " clients, worst certificate " << fmt17(worst) << ")\n";
    return kExitOk;
  } catch (const ConvergenceFailure& e) {
    std::error_code ec;
    fs::remove(path, ec);
    fs::remove(path + ".tmp", ec);
    log << "local pretraining failed: " << e.what() << "\n";
    return kExitFailure;
  }
}

int cmd_run(const RunConfig& cfg, std::ostream& log) {
  fs::create_directories(cfg.output_dir);

  std::vector<ObjectivePtr> clients = build_clients(cfg);
  const int dim = clients[0]->dim();

  LocalBundle bundle;
  const std::string bpath = bundle_path(cfg);
  if (fs::exists(bpath)) {
    bundle = read_bundle(bpath, clients.size(), dim);
    log << "loaded local bundle " << bpath << "\n";
  } else {
    bundle = compute_local_bundle(cfg, clients);
    write_bundle(bpath, bundle, dim);
    log << "wrote local bundle " << bpath << "\n";
  }

  const std::vector<double> betas =
      cfg.alpha_list.empty() ? cfg.alpha_grid : std::vector<double>{0.0};
  const std::vector<int> k_grid = resolve_k_grid(cfg, dim);

  const StepsizeMode mode = cfg.stepsize == "theoretical"
                                ? StepsizeMode::theoretical()
                                : StepsizeMode::manual(std::stod(cfg.stepsize));
  const long rounds = cfg.resolved_rounds();

  std::ostringstream manifest;
  manifest << "run_id,file,algorithm,beta,k,seed,gamma,rounds,status\n";
  std::size_t index = 0;
  bool any_failed = false;

  for (const double beta : betas) {
    const AlphaVector alpha = alpha_for(cfg, beta);
    FlixProblem problem(clients, alpha, bundle.models, cfg.local_tolerance);
    if (alpha.all_zero()) {
      log << "skipping alpha = 0 (objective constant; solvers need alpha > 0)\n";
      continue;
    }
    const ReferenceOptimum ref = high_precision_optimum(problem);
    const double summary = beta_summary(alpha);

    for (const int k : k_grid) {
      const std::string run_id = make_run_id(index, cfg.algorithm, summary, k);
      const std::string file = run_id + ".csv";
      std::string status = "ok";
      double gamma = 0.0;
      try {
        Trajectory traj;
        if (cfg.algorithm == "dgd") {
          DgdOptions opt;
          opt.stepsize = mode;
          opt.rounds = rounds;
          opt.reference = &ref.x_star;
          traj = run_dgd(problem, opt);
        } else {
          CompressedOptions opt;
          opt.specs.assign(static_cast<std::size_t>(problem.num_clients()),
                           k >= dim ? CompressorSpec::identity(dim)
                                    : CompressorSpec::rand_k(dim, k));
          opt.stepsize = mode;
          opt.rounds = rounds;
          opt.seed = cfg.seed;
          opt.reference = &ref.x_star;
          traj = cfg.algorithm == "dcgd" ? run_dcgd(problem, opt)
                                         : run_diana(problem, opt);
        }
        gamma = traj.gamma;
        write_metrics_csv((fs::path(cfg.output_dir) / file).string(), run_id,
                          cfg.algorithm, summary, k, traj, ref.f_star);
      } catch (const DivergedError& e) {
        status = "diverged";
        any_failed = true;
        log << run_id << ": " << e.what() << "\n";
      }
      // Diverged runs leave no CSV behind; the manifest row records that.
      manifest << run_id << ',' << (status == "ok" ? file : "") << ','
               << cfg.algorithm << ',' << fmt17(summary) << ',' << k << ','
               << cfg.seed << ',' << fmt17(gamma) << ',' << rounds << ','
               << status << "\n";
      ++index;
    }
  }

  const std::string manifest_path =
      (fs::path(cfg.output_dir) / "manifest.csv").string();
  std::ofstream mout(manifest_path, std::ios::binary);
  if (!mout) throw std::runtime_error("cannot write manifest: " + manifest_path);
  mout << manifest.str();
  log << "wrote " << index << " runs and " << manifest_path << "\n";
  return any_failed ? kExitFailure : kExitOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& log) {
  fs::create_directories(cfg.output_dir);
  const std::vector<CheckResult> results =
      run_check_suite(cfg.seed, cfg.verify_stepsize_scale);

  nlohmann::json report;
  report["seed"] = cfg.seed;
  report["stepsize_scale"] = cfg.verify_stepsize_scale;
  report["all_passed"] = all_passed(results);
  report["checks"] = nlohmann::json::array();
  for (const CheckResult& r : results) {
    log << (r.passed ? "[PASS] " : "[FAIL] ") << r.name
        << "  measured=" << fmt17(r.measured) << "  bound=" << fmt17(r.bound)
        << "\n";
    report["checks"].push_back({{"name", r.name},
                                {"passed", r.passed},
                                {"measured", r.measured},
                                {"bound", r.bound},
                                {"detail", r.detail}});
  }
  const std::string report_path =
      (fs::path(cfg.output_dir) / "verify_report.json").string();
  std::ofstream out(report_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write report: " + report_path);
  out << report.dump(2) << "\n";
  log << "wrote " << report_path << "\n";
  return all_passed(results) ? kExitOk : kExitFailure;
}

int cmd_budget(const RunConfig& cfg, double epsilon, std::ostream& log) {
  if (!cfg.alpha_list.empty()) {
    log << "budget: the ladder is stated for equal alpha only\n";
    return kExitUsage;
  }
  // The ladder depends on the problem, not on a particular beta.
  FlixProblem problem = build_problem(cfg, AlphaVector::constant(cfg.clients, 1.0));
  CommBudget budget;
  try {
    budget = comm_budget(problem, epsilon);
  } catch (const std::invalid_argument& e) {
    log << "budget: " << e.what() << "\n";
    return kExitUsage;
  }
  const AggregateConstants agg = aggregate_constants(problem);
  const double V = one_shot_average(problem).V;

  log << "epsilon = " << fmt17(epsilon) << "\n";
  log << "A = " << fmt17(budget.A) << "  q = " << fmt17(budget.q)
      << "  hetero_alpha_bound = " << fmt17(budget.hetero_alpha_bound) << "\n";
  log << "beta = 0: 0 communications (pure local models)\n";

  std::vector<double> rung_betas;
  if (budget.A < 1.0) {
    log << "0 < beta <= " << fmt17(budget.A) << ": 1 communication (compute x_avg)\n";
    rung_betas.push_back(budget.A);
    double lo = budget.A;
    for (long k = 1; lo < 1.0 && k <= 64; ++k) {
      const double hi = std::min(1.0, budget.A * std::pow(budget.q, static_cast<double>(k)));
      log << fmt17(lo) << " < beta <= " << fmt17(hi) << ": " << (k + 1)
          << " communications\n";
      rung_betas.push_back(hi);
      lo = hi;
    }
  } else {
    log << "0 < beta <= 1: 1 communication (compute x_avg)\n";
    rung_betas.push_back(1.0);
  }
  const double full_rounds =
      (agg.L_hat / agg.mu_hat) * std::log(agg.L_hat * V / (2.0 * epsilon));
  log << "beta = 1: " << budget.communications(1.0)
      << " communications promised (standard GD complexity ~ "
      << fmt17(std::max(0.0, full_rounds)) << " rounds)\n";

  if (!cfg.budget_confirm) return kExitOk;

  bool all_ok = true;
  for (const double beta : rung_betas) {
    const FlixProblem p = problem.with_alpha(AlphaVector::constant(cfg.clients, beta));
    const ReferenceOptimum ref = high_precision_optimum(p);
    const long promised = budget.communications(beta);
    DgdOptions opt;
    opt.rounds = promised > 0 ? promised - 1 : 0;
    const Trajectory traj = run_dgd(p, opt);
    const double gap = traj.points.back().objective - ref.f_star;
    const bool ok = gap <= epsilon;
    all_ok = all_ok && ok;
    log << "confirm beta = " << fmt17(beta) << ": " << promised
        << " communications, gap = " << fmt17(gap) << (ok ? " <= " : " > ")
        << fmt17(epsilon) << (ok ? " [ok]" : " [MISSED]") << "\n";
  }
  return all_ok ? kExitOk : kExitFailure;
}

}  // namespace flix
