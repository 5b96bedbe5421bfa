#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <istream>
#include <string>
#include <utility>
#include <vector>

#include "flix/objectives.hpp"

namespace flix {

/// A parsed two-class dataset: sparse feature rows plus raw label values.
struct RawDataset {
  std::vector<double> labels;                             // r entries
  std::vector<std::vector<std::pair<int, double>>> rows;  // 0-based indices
  int dim = 0;

  std::size_t size() const { return rows.size(); }
};

/// Parses LIBSVM text: `label idx:val idx:val ...` per line, 1-based strictly
/// increasing indices, blank lines skipped. d is the maximum index seen unless
/// `dim_override` > 0. Throws ParseError with the offending line number.
RawDataset parse_libsvm(std::istream& input, int dim_override = 0);
RawDataset parse_libsvm_file(const std::string& path, int dim_override = 0);

/// Inverse of parse_libsvm for round-trip checks; emits values with 17
/// significant digits.
std::string serialize_libsvm(const RawDataset& ds);

/// Folds labels into signed dense rows: row j becomes y_j * feature_j with
/// y_j in {-1,+1}. Datasets label classes as {+1,-1}, {1,2} or {0,1}; the
/// numerically smaller label maps to -1. Throws on more than two classes.
Eigen::MatrixXd fold_labels(const RawDataset& ds);

/// Contiguous, order-preserving split of r rows over n machines:
/// machine i (1-based) owns rows floor((i-1)r/n)+1 .. floor(ir/n).
struct PartitionSpec {
  std::size_t total = 0;
  std::vector<std::pair<std::size_t, std::size_t>> ranges;  // 0-based half-open
};

PartitionSpec partition_contiguous(std::size_t r, std::size_t n);

/// One logistic client per partition range over the folded rows.
std::vector<ObjectivePtr> make_logistic_clients(const Eigen::MatrixXd& folded_rows,
                                                const PartitionSpec& partition,
                                                double lambda);

struct SyntheticQuadraticConfig {
  int clients = 0;
  int dim = 0;
  double spectrum_min = 1.0;  // smallest admissible eigenvalue
  double spectrum_max = 1.0;  // largest admissible eigenvalue
  std::uint64_t seed = 0;
};

struct SyntheticLogisticConfig {
  int clients = 0;
  int dim = 0;
  int per_client = 0;
  double lambda = 0.0;
  double mean_shift = 0.0;     // per-client mean offset magnitude
  double feature_scale = 1.0;  // std of the Gaussian rows
  std::uint64_t seed = 0;
};

/// Per client: A_i = Q^T diag(log-uniform spectrum) Q with Q a random
/// orthogonal matrix, b_i standard Gaussian. Same seed, same objectives.
std::vector<ObjectivePtr> gen_synthetic(const SyntheticQuadraticConfig& cfg);

/// Per client: signed Gaussian rows shifted by a per-client mean direction of
/// magnitude `mean_shift`; shift 0 makes clients statistically exchangeable.
std::vector<ObjectivePtr> gen_synthetic(const SyntheticLogisticConfig& cfg);

/// Downloads a dataset over HTTP(S) to `dest_path`; datasets are not bundled
/// with the repository. Returns false on any transport or filesystem failure.
bool fetch_dataset(const std::string& url, const std::string& dest_path);

}  // namespace flix
