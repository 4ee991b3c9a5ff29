#include <vector>

#include <benchmark/benchmark.h>

#include "mdke/dataset.hpp"
#include "mdke/gradient.hpp"

namespace {

void BM_LossAndGradient(benchmark::State& state) {
  const auto b = static_cast<std::size_t>(state.range(0));
  const auto s = static_cast<std::size_t>(state.range(1));
  const auto ds = mdke::synth_sphere_mixture(b, s, 3, 0.5, 1);
  const auto enc = mdke::init_encoder(mdke::EncoderKind::kMlp, {3, 64, 3}, 1);
  std::vector<mdke::EncoderInput> batch;
  for (const auto& d : ds.distributions()) batch.push_back(mdke::make_input(d));
  mdke::LossSettings settings;
  settings.gamma1 = 1.0;
  settings.gamma2 = 3.0;
  settings.epsilon = state.range(2) != 0 ? 0.05 : 0.0;
  for (auto _ : state) {
    auto g = mdke::loss_and_gradient(enc, batch, settings);
    benchmark::DoNotOptimize(g.gradient.data());
  }
}
BENCHMARK(BM_LossAndGradient)
    ->Args({8, 32, 0})
    ->Args({8, 32, 1})
    ->Args({32, 32, 0})
    ->Args({8, 128, 0})
    ->Unit(benchmark::kMillisecond);

}  // namespace
