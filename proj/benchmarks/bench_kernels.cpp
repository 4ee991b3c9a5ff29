#include <vector>

#include <benchmark/benchmark.h>

#include "mdke/kernels.hpp"
#include "mdke/objective.hpp"
#include "mdke/random.hpp"
#include "mdke/sliced_wasserstein.hpp"

namespace {

std::vector<mdke::WeightedPoints> random_batch(std::size_t m, Eigen::Index n, Eigen::Index d) {
  mdke::Rng rng(7);
  std::vector<mdke::WeightedPoints> out;
  for (std::size_t i = 0; i < m; ++i) {
    Eigen::MatrixXd z = rng.normal_matrix(n, d);
    z.rowwise().normalize();
    out.push_back(mdke::uniform_points(std::move(z)));
  }
  return out;
}

void BM_DistributionGram(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto n = state.range(1);
  const auto batch = random_batch(m, n, 3);
  std::vector<std::string> ids(m, "x");
  for (auto _ : state) {
    auto g = mdke::distribution_gram(batch, ids, mdke::DistributionKernel::kGaussian, 2.0, 3.0);
    benchmark::DoNotOptimize(g.values.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(m * m / 2) * n * n);
}
BENCHMARK(BM_DistributionGram)->Args({8, 32})->Args({32, 32})->Args({32, 128})->Unit(benchmark::kMillisecond);

void BM_EntropyFrobenius(benchmark::State& state) {
  mdke::Rng rng(3);
  const auto m = state.range(0);
  Eigen::MatrixXd a = rng.normal_matrix(m, 4);
  a.rowwise().normalize();
  const Eigen::MatrixXd k = a * a.transpose();
  for (auto _ : state) benchmark::DoNotOptimize(mdke::renyi2_entropy(k));
}
BENCHMARK(BM_EntropyFrobenius)->Arg(64)->Arg(512);

void BM_SlicedWasserstein(benchmark::State& state) {
  mdke::Rng rng(5);
  const Eigen::MatrixXd p = rng.normal_matrix(state.range(0), 6);
  const Eigen::MatrixXd q = rng.normal_matrix(state.range(0), 6);
  const Eigen::MatrixXd dirs = mdke::random_directions(100, 6, rng);
  for (auto _ : state) benchmark::DoNotOptimize(mdke::sliced_wasserstein_estimate(p, q, 2, dirs).value);
}
BENCHMARK(BM_SlicedWasserstein)->Arg(100)->Arg(1000);

}  // namespace
