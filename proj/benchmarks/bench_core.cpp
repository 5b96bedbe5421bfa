#include <benchmark/benchmark.h>

#include <Eigen/Core>

#include "flix/compression.hpp"
#include "flix/rng.hpp"
#include "flix/solvers.hpp"
#include "flix/verification.hpp"

namespace {

flix::FlixProblem bench_problem(int clients, int dim) {
  return flix::make_synthetic_logistic_problem(clients, dim, 50, 0.1, 1.0, 0.5,
                                               2027);
}

void BM_FlixGradient(benchmark::State& state) {
  const flix::FlixProblem p =
      bench_problem(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const Eigen::VectorXd x = flix::one_shot_average(p).x_avg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(flix::flix_grad(p, x));
  }
}
BENCHMARK(BM_FlixGradient)->Args({10, 50})->Args({50, 50})->Args({50, 300});

void BM_RandKCompress(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int k = static_cast<int>(state.range(1));
  const flix::CompressorSpec spec = flix::CompressorSpec::rand_k(d, k);
  flix::Rng source(1);
  Eigen::VectorXd v(d);
  for (int j = 0; j < d; ++j) v[j] = source.normal();
  flix::Rng rng(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(flix::compress(spec, v, rng));
  }
}
BENCHMARK(BM_RandKCompress)->Args({300, 30})->Args({3000, 300});

void BM_DgdRound(benchmark::State& state) {
  const flix::FlixProblem p = bench_problem(20, 100);
  flix::DgdOptions opt;
  opt.rounds = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(flix::run_dgd(p, opt));
  }
}
BENCHMARK(BM_DgdRound);

void BM_DianaRound(benchmark::State& state) {
  const flix::FlixProblem p = bench_problem(20, 100);
  flix::CompressedOptions opt;
  opt.specs.assign(20, flix::CompressorSpec::rand_k(100, 10));
  opt.rounds = 1;
  opt.seed = 3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(flix::run_diana(p, opt));
  }
}
BENCHMARK(BM_DianaRound);

void BM_PowerIteration(benchmark::State& state) {
  flix::Rng rng(5);
  const int rows = static_cast<int>(state.range(0));
  const int cols = static_cast<int>(state.range(1));
  Eigen::MatrixXd data(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) data(i, j) = rng.normal();
  for (auto _ : state) {
    benchmark::DoNotOptimize(flix::gram_spectral_norm(data));
  }
}
BENCHMARK(BM_PowerIteration)->Args({500, 100})->Args({2000, 300});

}  // namespace

BENCHMARK_MAIN();
