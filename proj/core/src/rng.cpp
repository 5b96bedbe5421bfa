#include "flix/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace flix {

namespace {

// splitmix64; used only to spread seeds before feeding mt19937_64.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

Rng Rng::for_client(std::uint64_t master_seed, std::int64_t client,
                    std::int64_t round) {
  std::uint64_t s = mix64(master_seed);
  s = mix64(s ^ static_cast<std::uint64_t>(client));
  s = mix64(s ^ static_cast<std::uint64_t>(round));
  return Rng(s);
}

std::uint64_t Rng::next_u64() { return engine_(); }

double Rng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u1 = uniform01();
  while (u1 <= 0.0) u1 = uniform01();
  const double u2 = uniform01();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_normal_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::int64_t Rng::uniform_int(std::int64_t bound) {
  if (bound < 1) throw std::invalid_argument("uniform_int: bound must be >= 1");
  const std::uint64_t b = static_cast<std::uint64_t>(bound);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % b;
  std::uint64_t draw = next_u64();
  while (draw >= limit) draw = next_u64();
  return static_cast<std::int64_t>(draw % b);
}

std::vector<std::int32_t> Rng::sample_without_replacement(std::int32_t population,
                                                          std::int32_t k) {
  if (k < 0 || population < k) {
    throw std::invalid_argument("sample_without_replacement: need 0 <= k <= population");
  }
  std::vector<std::int32_t> pool(static_cast<std::size_t>(population));
  for (std::int32_t i = 0; i < population; ++i) pool[static_cast<std::size_t>(i)] = i;
  for (std::int32_t i = 0; i < k; ++i) {
    const std::int64_t j = i + uniform_int(population - i);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(k));
  return pool;
}

}  // namespace flix
