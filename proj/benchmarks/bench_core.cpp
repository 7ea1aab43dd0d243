// Microbenchmarks for the hot paths: KL evaluation, the mismatched-divergence
// Newton solver, the rank projection, and a small end-to-end SVP solve.

#include "uht/feature_extraction.hpp"
#include "uht/mismatched.hpp"
#include "uht/prob.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace {

using namespace uht;

Distribution random_distribution(std::mt19937_64& eng, int m) {
  Eigen::VectorXd w(m);
  for (int z = 0; z < m; ++z) w[z] = -std::log(1.0 - uniform01(eng)) + 1e-3;
  return Distribution::normalized(w);
}

FeatureBasis random_basis(std::mt19937_64& eng, int m, int d) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (;;) {
    Eigen::MatrixXd rows(d, m);
    for (int i = 0; i < d; ++i) {
      for (int z = 0; z < m; ++z) rows(i, z) = normal(eng);
      rows.row(i).array() -= rows.row(i).mean();
    }
    if (FeatureBasis::is_minimal(rows)) return FeatureBasis(Alphabet(m), rows);
  }
}

void bm_kl_divergence(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  auto eng = make_engine({1, 0});
  const Distribution mu = random_distribution(eng, m);
  const Distribution pi = random_distribution(eng, m);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kl_divergence(mu, pi));
  }
}
BENCHMARK(bm_kl_divergence)->Arg(8)->Arg(64)->Arg(512);

void bm_mismatched_divergence(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const int d = static_cast<int>(state.range(1));
  auto eng = make_engine({2, 0});
  const Distribution mu = random_distribution(eng, m);
  const Distribution pi = random_distribution(eng, m);
  const FeatureBasis basis = random_basis(eng, m, d);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mismatched_divergence(mu, pi, basis).value);
  }
}
BENCHMARK(bm_mismatched_divergence)
    ->Args({8, 2})
    ->Args({20, 5})
    ->Args({64, 10});

void bm_svp_project(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const int m = static_cast<int>(state.range(1));
  auto eng = make_engine({3, 0});
  std::normal_distribution<double> normal(0.0, 1.0);
  FunctionMatrix x(p, m);
  for (int i = 0; i < x.size(); ++i) x(i) = normal(eng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(svp_project(x, std::min(p, m) / 2));
  }
}
BENCHMARK(bm_svp_project)->Args({10, 20})->Args({50, 20})->Args({50, 64});

void bm_svp_solve(benchmark::State& state) {
  const int m = 20, p = 10, d = 3;
  auto eng = make_engine({4, 0});
  const Distribution pi0 = random_distribution(eng, m);
  std::vector<Distribution> alts;
  for (int i = 0; i < p; ++i) alts.push_back(random_distribution(eng, m));
  const ObjectiveSpec spec(pi0, alts, Eigen::VectorXd::Ones(p), d);
  SvpConfig cfg;
  cfg.step = 1.0 / lipschitz_constant(spec);
  cfg.stop_eps = 1e-6;
  for (auto _ : state) {
    benchmark::DoNotOptimize(svp_solve(spec, cfg).objective);
  }
}
BENCHMARK(bm_svp_solve);

}  // namespace

BENCHMARK_MAIN();
