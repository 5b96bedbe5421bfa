#pragma once

#include <Eigen/Core>
#include <vector>

#include "flix/rng.hpp"

namespace flix {

/// An unbiased randomized compression operator C with variance parameter
/// omega: E[C(v)] = v and E||C(v) - v||^2 <= omega ||v||^2.
class CompressorSpec {
 public:
  enum class Kind { identity, rand_k };

  static CompressorSpec identity(int dim);
  static CompressorSpec rand_k(int dim, int k);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  int k() const { return k_; }

  /// 0 for identity, d/k - 1 for rand_k.
  double omega() const;

  /// Uplink floats per compressed vector: d for identity, k for rand_k
  /// (values only; indices are not counted).
  int payload_floats() const;

 private:
  CompressorSpec(Kind kind, int dim, int k) : kind_(kind), dim_(dim), k_(k) {}

  Kind kind_;
  int dim_;
  int k_;
};

/// Applies the operator: identity returns v; rand_k keeps a uniformly random
/// k-subset of coordinates scaled by d/k and zeroes the rest. Draws exactly
/// one subset from `rng` per call.
Eigen::VectorXd compress(const CompressorSpec& spec, const Eigen::VectorXd& v,
                         Rng& rng);

/// `count` values of k linearly spaced between 1 and d inclusive,
/// rounded (half away from zero), deduplicated, endpoints preserved.
std::vector<int> k_sweep(int dim, int count = 7);

}  // namespace flix
