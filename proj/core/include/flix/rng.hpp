#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace flix {

/// Deterministic random source. All randomness in the library flows through
/// this type so that runs are reproducible from a single master seed; each
/// simulated client draws from its own stream derived from
/// (master seed, client id, round), independent of execution order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  static Rng for_client(std::uint64_t master_seed, std::int64_t client,
                        std::int64_t round);

  std::uint64_t next_u64();

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform01();

  double uniform(double lo, double hi);

  /// Standard Gaussian (Box-Muller, cached spare).
  double normal();

  /// Uniform integer in [0, bound), bound >= 1. Rejection sampling, unbiased.
  std::int64_t uniform_int(std::int64_t bound);

  /// Uniformly random k-subset of {0, ..., population-1} via a partial
  /// Fisher-Yates shuffle; exact uniformity over k-subsets.
  std::vector<std::int32_t> sample_without_replacement(std::int32_t population,
                                                       std::int32_t k);

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace flix
