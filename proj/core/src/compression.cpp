#include "flix/compression.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace flix {

CompressorSpec CompressorSpec::identity(int dim) {
  if (dim < 1) throw std::invalid_argument("CompressorSpec: dim must be >= 1");
  return CompressorSpec(Kind::identity, dim, dim);
}

CompressorSpec CompressorSpec::rand_k(int dim, int k) {
  if (dim < 1) throw std::invalid_argument("CompressorSpec: dim must be >= 1");
  if (k < 1 || k > dim) {
    throw std::invalid_argument("CompressorSpec: need 1 <= k <= dim");
  }
  return CompressorSpec(Kind::rand_k, dim, k);
}

double CompressorSpec::omega() const {
  if (kind_ == Kind::identity) return 0.0;
  return static_cast<double>(dim_) / static_cast<double>(k_) - 1.0;
}

int CompressorSpec::payload_floats() const {
  return kind_ == Kind::identity ? dim_ : k_;
}

Eigen::VectorXd compress(const CompressorSpec& spec, const Eigen::VectorXd& v,
                         Rng& rng) {
  if (v.size() != spec.dim()) {
    throw std::invalid_argument("compress: vector dimension does not match spec");
  }
  if (spec.kind() == CompressorSpec::Kind::identity) return v;

  const double scale = static_cast<double>(spec.dim()) / static_cast<double>(spec.k());
  const std::vector<std::int32_t> kept =
      rng.sample_without_replacement(spec.dim(), spec.k());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
  for (const std::int32_t idx : kept) out[idx] = scale * v[idx];
  return out;
}

std::vector<int> k_sweep(int dim, int count) {
  if (count < 2) throw std::invalid_argument("k_sweep: count must be >= 2");
  if (dim < 1) throw std::invalid_argument("k_sweep: dim must be >= 1");
  // dim < count is allowed: the spacing degenerates and dedup shortens the list.
  std::vector<int> values;
  values.reserve(static_cast<std::size_t>(count));
  for (int t = 0; t < count; ++t) {
    const double pos = 1.0 + static_cast<double>(t) *
                                 static_cast<double>(dim - 1) /
                                 static_cast<double>(count - 1);
    values.push_back(static_cast<int>(std::llround(pos)));
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

}  // namespace flix
