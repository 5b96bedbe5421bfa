#include "flix/run_config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "flix/errors.hpp"

namespace flix {

namespace {

std::string trim(const std::string& s) {
  const std::size_t begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return {};
  const std::size_t end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

double to_double(const std::string& v, std::size_t line) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw ParseError("bad number '" + v + "'", line);
    return x;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError("bad number '" + v + "'", line);
  }
}

long to_long(const std::string& v, std::size_t line) {
  try {
    std::size_t used = 0;
    const long x = std::stol(v, &used);
    if (used != v.size()) throw ParseError("bad integer '" + v + "'", line);
    return x;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError("bad integer '" + v + "'", line);
  }
}

std::vector<double> to_double_list(const std::string& v, std::size_t line) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ParseError("empty list entry", line);
    out.push_back(to_double(item, line));
  }
  if (out.empty()) throw ParseError("empty list", line);
  return out;
}

bool to_bool(const std::string& v, std::size_t line) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ParseError("bad boolean '" + v + "'", line);
}

}  // namespace

long RunConfig::resolved_rounds() const {
  if (rounds >= 0) return rounds;
  return algorithm == "dgd" ? 2000 : 10000;
}

RunConfig parse_run_config(std::istream& input) {
  RunConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(input, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;

    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ParseError("expected 'section.key = value'", line_no);
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ParseError("expected 'section.key = value'", line_no);
    }

    if (key == "problem.kind") cfg.problem_kind = value;
    else if (key == "problem.path") cfg.libsvm_path = value;
    else if (key == "problem.url") cfg.libsvm_url = value;
    else if (key == "problem.lambda") cfg.lambda = to_double(value, line_no);
    else if (key == "problem.clients") cfg.clients = static_cast<int>(to_long(value, line_no));
    else if (key == "problem.dim") cfg.dim = static_cast<int>(to_long(value, line_no));
    else if (key == "problem.per_client") cfg.per_client = static_cast<int>(to_long(value, line_no));
    else if (key == "problem.mean_shift") cfg.mean_shift = to_double(value, line_no);
    else if (key == "problem.feature_scale") cfg.feature_scale = to_double(value, line_no);
    else if (key == "problem.spectrum_min") cfg.spectrum_min = to_double(value, line_no);
    else if (key == "problem.spectrum_max") cfg.spectrum_max = to_double(value, line_no);
    else if (key == "alpha.scalar") cfg.alpha_grid = {to_double(value, line_no)};
    else if (key == "alpha.grid") cfg.alpha_grid = to_double_list(value, line_no);
    else if (key == "alpha.list") cfg.alpha_list = to_double_list(value, line_no);
    else if (key == "run.algorithm") cfg.algorithm = value;
    else if (key == "run.rounds") cfg.rounds = to_long(value, line_no);
    else if (key == "run.stepsize") cfg.stepsize = value;
    else if (key == "run.seed") {
      cfg.seed = static_cast<std::uint64_t>(to_long(value, line_no));
      cfg.seed_present = true;
    } else if (key == "compressor.kind") cfg.compressor_kind = value;
    else if (key == "compressor.k") cfg.compressor_k = static_cast<int>(to_long(value, line_no));
    else if (key == "compressor.sweep_count") cfg.sweep_count = static_cast<int>(to_long(value, line_no));
    else if (key == "local.tolerance") cfg.local_tolerance = to_double(value, line_no);
    else if (key == "local.max_iters") cfg.local_max_iters = to_long(value, line_no);
    else if (key == "output.dir") cfg.output_dir = value;
    else if (key == "budget.confirm") cfg.budget_confirm = to_bool(value, line_no);
    else if (key == "verify.stepsize_scale") cfg.verify_stepsize_scale = to_double(value, line_no);
    else throw ParseError("unknown key '" + key + "'", line_no);
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw std::invalid_argument("cannot open config file: " + path);
  return parse_run_config(file);
}

void validate_run_config(const RunConfig& cfg) {
  const auto fail = [](const std::string& message) {
    throw std::invalid_argument("config: " + message);
  };

  if (cfg.problem_kind != "libsvm" && cfg.problem_kind != "synthetic_logistic" &&
      cfg.problem_kind != "synthetic_quadratic") {
    fail("problem.kind must be libsvm, synthetic_logistic or synthetic_quadratic");
  }
  if (cfg.problem_kind == "libsvm" && cfg.libsvm_path.empty()) {
    fail("libsvm problems need problem.path");
  }
  if (cfg.lambda < 0.0) fail("problem.lambda must be >= 0");
  if (cfg.clients < 1) fail("problem.clients must be >= 1");
  if (cfg.problem_kind != "libsvm" && cfg.dim < 1) {
    fail("synthetic problems need problem.dim >= 1");
  }
  if (cfg.problem_kind == "synthetic_logistic" && cfg.per_client < 1) {
    fail("problem.per_client must be >= 1");
  }
  if (cfg.problem_kind == "synthetic_logistic" && !(cfg.feature_scale > 0.0)) {
    fail("problem.feature_scale must be > 0");
  }
  if (cfg.problem_kind == "synthetic_quadratic" &&
      (!(cfg.spectrum_min > 0.0) || cfg.spectrum_max < cfg.spectrum_min)) {
    fail("need 0 < problem.spectrum_min <= problem.spectrum_max");
  }

  if (cfg.alpha_grid.empty() && cfg.alpha_list.empty()) {
    fail("one of alpha.scalar, alpha.grid or alpha.list is required");
  }
  if (!cfg.alpha_grid.empty() && !cfg.alpha_list.empty()) {
    fail("alpha.grid and alpha.list are mutually exclusive");
  }
  for (double a : cfg.alpha_grid) {
    if (!(a >= 0.0 && a <= 1.0)) fail("alpha values must lie in [0, 1]");
  }
  for (double a : cfg.alpha_list) {
    if (!(a >= 0.0 && a <= 1.0)) fail("alpha values must lie in [0, 1]");
  }
  if (!cfg.alpha_list.empty() &&
      static_cast<int>(cfg.alpha_list.size()) != cfg.clients) {
    fail("alpha.list needs one entry per client");
  }

  if (cfg.algorithm != "dgd" && cfg.algorithm != "dcgd" && cfg.algorithm != "diana") {
    fail("run.algorithm must be dgd, dcgd or diana");
  }
  if (cfg.stepsize != "theoretical") {
    try {
      std::size_t used = 0;
      const double g = std::stod(cfg.stepsize, &used);
      if (used != cfg.stepsize.size() || !(g > 0.0)) throw std::exception();
    } catch (const std::exception&) {
      fail("run.stepsize must be 'theoretical' or a positive number");
    }
  }
  if (!cfg.seed_present) fail("run.seed is required (no wall-clock entropy)");

  if (cfg.compressor_kind != "identity" && cfg.compressor_kind != "rand_k" &&
      cfg.compressor_kind != "k_sweep") {
    fail("compressor.kind must be identity, rand_k or k_sweep");
  }
  if (cfg.compressor_kind == "rand_k" && cfg.compressor_k < 1) {
    fail("rand_k needs compressor.k >= 1");
  }
  if (cfg.compressor_kind == "k_sweep" && cfg.sweep_count < 2) {
    fail("k_sweep needs compressor.sweep_count >= 2");
  }
  if (!(cfg.local_tolerance > 0.0)) fail("local.tolerance must be > 0");
  if (cfg.local_max_iters < 1) fail("local.max_iters must be >= 1");
  if (cfg.output_dir.empty()) fail("output.dir must be nonempty");
  if (!(cfg.verify_stepsize_scale > 0.0)) fail("verify.stepsize_scale must be > 0");
}

}  // namespace flix
