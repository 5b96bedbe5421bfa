#include "flix/data_io.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "flix/errors.hpp"
#include "flix/rng.hpp"

// cpp-httplib is header-only; keep it out of the public header.
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

namespace flix {

namespace {

double parse_double_token(const std::string& token, std::size_t line) {
  try {
    std::size_t consumed = 0;
    const double v = std::stod(token, &consumed);
    if (consumed != token.size()) {
      throw ParseError("unparsable number '" + token + "'", line);
    }
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError("unparsable number '" + token + "'", line);
  }
}

}  // namespace

RawDataset parse_libsvm(std::istream& input, int dim_override) {
  RawDataset ds;
  std::string line;
  std::size_t line_no = 0;
  int max_index = 0;
  while (std::getline(input, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::string token;
    if (!(fields >> token)) continue;  // blank line

    ds.labels.push_back(parse_double_token(token, line_no));
    std::vector<std::pair<int, double>> row;
    int prev_index = 0;
    while (fields >> token) {
      const std::size_t colon = token.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == token.size()) {
        throw ParseError("malformed token '" + token + "'", line_no);
      }
      int index = 0;
      const char* begin = token.data();
      const auto [ptr, ec] = std::from_chars(begin, begin + colon, index);
      if (ec != std::errc() || ptr != begin + colon) {
        throw ParseError("malformed index in '" + token + "'", line_no);
      }
      if (index < 1) throw ParseError("feature index must be >= 1", line_no);
      if (index <= prev_index) {
        throw ParseError("feature indices must be strictly increasing", line_no);
      }
      const double value = parse_double_token(token.substr(colon + 1), line_no);
      row.emplace_back(index - 1, value);
      prev_index = index;
      max_index = std::max(max_index, index);
    }
    ds.rows.push_back(std::move(row));
  }
  ds.dim = dim_override > 0 ? dim_override : max_index;
  if (dim_override > 0 && max_index > dim_override) {
    throw ParseError("feature index " + std::to_string(max_index) +
                         " exceeds dimension override " + std::to_string(dim_override),
                     line_no);
  }

  std::set<double> distinct(ds.labels.begin(), ds.labels.end());
  if (distinct.size() > 2) {
    throw ParseError("more than two distinct label values", line_no);
  }
  return ds;
}

RawDataset parse_libsvm_file(const std::string& path, int dim_override) {
  std::ifstream file(path);
  if (!file) throw std::invalid_argument("cannot open dataset file: " + path);
  return parse_libsvm(file, dim_override);
}

std::string serialize_libsvm(const RawDataset& ds) {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < ds.rows.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", ds.labels[i]);
    out += buf;
    for (const auto& [idx, val] : ds.rows[i]) {
      std::snprintf(buf, sizeof(buf), " %d:%.17g", idx + 1, val);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

Eigen::MatrixXd fold_labels(const RawDataset& ds) {
  std::set<double> distinct(ds.labels.begin(), ds.labels.end());
  if (distinct.size() > 2) {
    throw std::invalid_argument("fold_labels: more than two label classes");
  }
  // Numerically smaller label -> -1 (datasets use {+1,-1}, {1,2} or {0,1}).
  const double low = distinct.empty() ? 0.0 : *distinct.begin();

  Eigen::MatrixXd folded = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(ds.rows.size()), ds.dim);
  for (std::size_t i = 0; i < ds.rows.size(); ++i) {
    const double sign = (distinct.size() == 2 && ds.labels[i] == low) ? -1.0 : 1.0;
    for (const auto& [idx, val] : ds.rows[i]) {
      folded(static_cast<Eigen::Index>(i), idx) = sign * val;
    }
  }
  return folded;
}

PartitionSpec partition_contiguous(std::size_t r, std::size_t n) {
  if (n < 1 || n > r) {
    throw std::invalid_argument("partition_contiguous: need 1 <= n <= r");
  }
  PartitionSpec spec;
  spec.total = r;
  spec.ranges.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) {
    const std::size_t begin = ((i - 1) * r) / n;  // floor((i-1)r/n)
    const std::size_t end = (i * r) / n;          // floor(ir/n)
    spec.ranges.emplace_back(begin, end);
  }
  return spec;
}

std::vector<ObjectivePtr> make_logistic_clients(const Eigen::MatrixXd& folded_rows,
                                                const PartitionSpec& partition,
                                                double lambda) {
  if (static_cast<std::size_t>(folded_rows.rows()) != partition.total) {
    throw std::invalid_argument("make_logistic_clients: partition does not match rows");
  }
  std::vector<ObjectivePtr> clients;
  clients.reserve(partition.ranges.size());
  for (const auto& [begin, end] : partition.ranges) {
    const Eigen::Index count = static_cast<Eigen::Index>(end - begin);
    clients.push_back(std::make_shared<LogisticObjective>(
        folded_rows.middleRows(static_cast<Eigen::Index>(begin), count), lambda));
  }
  return clients;
}

std::vector<ObjectivePtr> gen_synthetic(const SyntheticQuadraticConfig& cfg) {
  if (cfg.clients < 1 || cfg.dim < 1) {
    throw std::invalid_argument("gen_synthetic: clients and dim must be >= 1");
  }
  if (!(cfg.spectrum_min > 0.0) || cfg.spectrum_max < cfg.spectrum_min) {
    throw std::invalid_argument("gen_synthetic: need 0 < spectrum_min <= spectrum_max");
  }
  std::vector<ObjectivePtr> clients;
  clients.reserve(static_cast<std::size_t>(cfg.clients));
  const double log_lo = std::log(cfg.spectrum_min);
  const double log_hi = std::log(cfg.spectrum_max);
  for (int i = 0; i < cfg.clients; ++i) {
    Rng rng = Rng::for_client(cfg.seed, i, /*round=*/-1);
    Eigen::MatrixXd gaussian(cfg.dim, cfg.dim);
    for (int r = 0; r < cfg.dim; ++r)
      for (int c = 0; c < cfg.dim; ++c) gaussian(r, c) = rng.normal();
    const Eigen::MatrixXd q =
        Eigen::HouseholderQR<Eigen::MatrixXd>(gaussian).householderQ();
    Eigen::VectorXd spectrum(cfg.dim);
    for (int j = 0; j < cfg.dim; ++j) {
      spectrum[j] = std::exp(rng.uniform(log_lo, log_hi));
    }
    Eigen::MatrixXd a = q.transpose() * spectrum.asDiagonal() * q;
    a = ((a + a.transpose()) / 2.0).eval();  // exact symmetry after roundoff
    Eigen::VectorXd b(cfg.dim);
    for (int j = 0; j < cfg.dim; ++j) b[j] = rng.normal();
    clients.push_back(std::make_shared<QuadraticObjective>(std::move(a), std::move(b)));
  }
  return clients;
}

std::vector<ObjectivePtr> gen_synthetic(const SyntheticLogisticConfig& cfg) {
  if (cfg.clients < 1 || cfg.dim < 1 || cfg.per_client < 1) {
    throw std::invalid_argument("gen_synthetic: clients, dim, per_client must be >= 1");
  }
  if (cfg.lambda < 0.0) throw std::invalid_argument("gen_synthetic: lambda must be >= 0");
  if (!(cfg.feature_scale > 0.0)) {
    throw std::invalid_argument("gen_synthetic: feature_scale must be > 0");
  }
  std::vector<ObjectivePtr> clients;
  clients.reserve(static_cast<std::size_t>(cfg.clients));
  for (int i = 0; i < cfg.clients; ++i) {
    Rng rng = Rng::for_client(cfg.seed, i, /*round=*/-1);
    Eigen::VectorXd shift = Eigen::VectorXd::Zero(cfg.dim);
    if (cfg.mean_shift != 0.0) {
      for (int j = 0; j < cfg.dim; ++j) shift[j] = rng.normal();
      const double norm = shift.norm();
      if (norm > 0.0) shift *= cfg.mean_shift / norm;
    }
    Eigen::MatrixXd rows(cfg.per_client, cfg.dim);
    for (int r = 0; r < cfg.per_client; ++r) {
      for (int c = 0; c < cfg.dim; ++c) {
        rows(r, c) = shift[c] + cfg.feature_scale * rng.normal();
      }
    }
    clients.push_back(std::make_shared<LogisticObjective>(std::move(rows), cfg.lambda));
  }
  return clients;
}

bool fetch_dataset(const std::string& url, const std::string& dest_path) {
  // Split scheme://host[:port]/path.
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) return false;
  const std::size_t path_start = url.find('/', scheme_end + 3);
  const std::string origin = path_start == std::string::npos
                                 ? url
                                 : url.substr(0, path_start);
  const std::string path = path_start == std::string::npos
                               ? std::string("/")
                               : url.substr(path_start);
  httplib::Client client(origin);
  client.set_follow_location(true);
  const httplib::Result res = client.Get(path);
  if (!res || res->status != 200) return false;
  std::ofstream out(dest_path, std::ios::binary);
  if (!out) return false;
  out.write(res->body.data(), static_cast<std::streamsize>(res->body.size()));
  return static_cast<bool>(out);
}

}  // namespace flix
