#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "mdke/downstream.hpp"
#include "mdke/random.hpp"

namespace {

Eigen::MatrixXd rbf_gram(Eigen::Index n, std::uint64_t seed) {
  mdke::Rng rng(seed);
  const Eigen::MatrixXd x = rng.normal_matrix(n, 5);
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) k(i, j) = std::exp(-0.2 * (x.row(i) - x.row(j)).squaredNorm());
  return k;
}

void BM_SmoSolve(benchmark::State& state) {
  const auto n = state.range(0);
  const Eigen::MatrixXd k = rbf_gram(n, 1);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = i % 2 == 0 ? 1.0 : -1.0;
  for (auto _ : state) {
    auto r = mdke::smo_solve(k, y, 10.0);
    benchmark::DoNotOptimize(r.alpha.data());
  }
}
BENCHMARK(BM_SmoSolve)->Arg(40)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_GridSearch(benchmark::State& state) {
  const auto n = state.range(0);
  const Eigen::MatrixXd k = rbf_gram(n, 2);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % 2);
  for (auto _ : state) {
    auto r = mdke::grid_search_eval(k, labels, {}, mdke::EvalProtocol{});
    benchmark::DoNotOptimize(r.mean);
  }
}
BENCHMARK(BM_GridSearch)->Arg(40)->Arg(200)->Unit(benchmark::kMillisecond);


}  // namespace
