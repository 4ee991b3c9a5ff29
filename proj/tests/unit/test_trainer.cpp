#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "mdke/bandwidth.hpp"
#include "mdke/errors.hpp"
#include "mdke/trainer.hpp"

namespace mdke {
namespace {

TrainConfig small_config() {
  TrainConfig c;
  c.steps = 20;
  c.batch_distributions = 4;
  c.samples_per_distribution = 8;
  c.seed = 3;
  c.hidden_dim = 8;
  return c;
}

KernelConfig fixed_kernel(double g1 = 2.0, double g2 = 3.0) {
  KernelConfig k;
  k.gamma1 = g1;
  k.gamma2 = g2;
  return k;
}

SupportIndexDataset histogram_dataset(std::size_t m, std::size_t v, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<IndexHistogram> hs;
  for (std::size_t i = 0; i < m; ++i) {
    IndexHistogram h{"h" + std::to_string(i), {}, {}, std::nullopt};
    for (std::size_t k = 0; k < 5; ++k) {
      h.indices.push_back(rng.index(v));
      h.weights.push_back(1.0 + rng.uniform());
    }
    const double total = std::accumulate(h.weights.begin(), h.weights.end(), 0.0);
    for (auto& w : h.weights) w /= total;
    hs.push_back(std::move(h));
  }
  return SupportIndexDataset("hist", v, std::move(hs));
}

TEST(TrainConfig, ValidationRejectsBadValues) {
  auto c = small_config();
  c.steps = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = small_config();
  c.batch_distributions = 1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = small_config();
  c.lr = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = small_config();
  c.epsilon = -0.1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Adam, FirstStepMovesEachCoordinateByLearningRate) {
  TrainState s = make_train_state(init_encoder(EncoderKind::kMlp, {3, 4, 2}, 1), 1);
  const Eigen::VectorXd before = flat_parameters(s.encoder);
  Rng rng(2);
  Eigen::VectorXd g = rng.normal_matrix(before.size(), 1);
  TrainConfig c;
  adam_step(s, g, c);
  const Eigen::VectorXd delta = flat_parameters(s.encoder) - before;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const double expected = -c.lr * g(i) / (std::abs(g(i)) + c.adam_eps);
    EXPECT_NEAR(delta(i), expected, 1e-15 + 1e-12 * c.lr);
  }
  EXPECT_EQ(s.step, 1u);
}

TEST(Adam, ZeroGradientLeavesParametersUnchanged) {
  TrainState s = make_train_state(init_encoder(EncoderKind::kTable, {5, 0, 3}, 4), 4);
  const Eigen::VectorXd before = flat_parameters(s.encoder);
  adam_step(s, Eigen::VectorXd::Zero(before.size()), TrainConfig{});
  EXPECT_LE((flat_parameters(s.encoder) - before).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Adam, RejectsNonFiniteGradient) {
  TrainState s = make_train_state(init_encoder(EncoderKind::kMlp, {2, 3, 2}, 5), 5);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(flat_parameters(s.encoder).size());
  g(0) = std::nan("");
  EXPECT_THROW(adam_step(s, g, TrainConfig{}), NumericalError);
}

TEST(Adam, TableRowsStayOnSphere) {
  TrainState s = make_train_state(init_encoder(EncoderKind::kTable, {7, 0, 3}, 6), 6);
  Rng rng(7);
  TrainConfig c;
  c.lr = 0.1;
  for (int t = 0; t < 10; ++t) {
    adam_step(s, rng.normal_matrix(21, 1), c);
    const auto& e = std::get<TableEncoder>(s.encoder).embeddings();
    for (Eigen::Index i = 0; i < e.rows(); ++i) ASSERT_NEAR(e.row(i).norm(), 1.0, 1e-12);
  }
}

TEST(ResolveBandwidths, ExplicitValuesPassThrough) {
  const auto bw = resolve_bandwidths(small_config(), fixed_kernel(0.7, 9.0), 10, 50);
  EXPECT_EQ(bw.gamma1, 0.7);
  EXPECT_EQ(bw.gamma2, 9.0);
}

TEST(ResolveBandwidths, AutoUsesBatchPointsAndDatasetSize) {
  TrainConfig c = small_config();
  c.batch_distributions = 10;
  c.samples_per_distribution = 20;
  c.latent_dim = 10;
  const auto bw = resolve_bandwidths(c, KernelConfig{}, 30, 50);
  EXPECT_TRUE(std::isfinite(bw.gamma1));
  EXPECT_GT(bw.gamma1, 0.0);
  EXPECT_GT(bw.gamma1, bw.gamma2);
  c.samples_per_distribution = 0;
  const auto exact = resolve_bandwidths(c, KernelConfig{}, 30, 50);
  EXPECT_NE(exact.gamma1, bw.gamma1);
}

TEST(Train, StepsOneLogsOnlyStepZero) {
  auto c = small_config();
  c.steps = 1;
  const auto r = train(synth_sphere_mixture(6, 20, 3, 0.5, 1), EncoderKind::kMlp, c, fixed_kernel());
  ASSERT_EQ(r.log.size(), 1u);
  EXPECT_EQ(r.log[0].step, 0u);
  EXPECT_EQ(r.checkpoint.step_count, 1u);
}

TEST(Train, LogEverySkipsSteps) {
  auto c = small_config();
  c.log_every = 5;
  const auto r = train(synth_sphere_mixture(6, 20, 3, 0.5, 1), EncoderKind::kMlp, c, fixed_kernel());
  ASSERT_EQ(r.log.size(), 4u);
  EXPECT_EQ(r.log[3].step, 15u);
}

TEST(Train, DeterministicForFixedSeed) {
  const auto ds = synth_sphere_mixture(6, 30, 3, 0.5, 2);
  const auto a = train(ds, EncoderKind::kMlp, small_config(), KernelConfig{});
  const auto b = train(ds, EncoderKind::kMlp, small_config(), KernelConfig{});
  EXPECT_TRUE((flat_parameters(a.checkpoint.encoder).array() == flat_parameters(b.checkpoint.encoder).array()).all());
  EXPECT_EQ(metrics_csv(a.log), metrics_csv(b.log));
  auto other = small_config();
  other.seed = 4;
  const auto c = train(ds, EncoderKind::kMlp, other, KernelConfig{});
  EXPECT_NE(metrics_csv(a.log), metrics_csv(c.log));
}

TEST(Train, FixedBandwidthDoesNotShiftBatches) {
  const auto ds = synth_sphere_mixture(8, 30, 3, 0.5, 2);
  auto c = small_config();
  c.steps = 1;
  const auto a = train(ds, EncoderKind::kMlp, c, KernelConfig{});
  KernelConfig k;
  k.gamma1 = a.checkpoint.gamma1;
  k.gamma2 = a.checkpoint.gamma2;
  const auto b = train(ds, EncoderKind::kMlp, c, k);
  EXPECT_EQ(metrics_csv(a.log), metrics_csv(b.log));
}

TEST(Train, BoundHoldsAtEveryLoggedStep) {
  auto c = small_config();
  c.steps = 60;
  const auto r = train(synth_sphere_mixture(8, 40, 3, 0.5, 5), EncoderKind::kMlp, c, KernelConfig{});
  for (const auto& row : r.log) {
    EXPECT_LE(row.s2, 2.0 * r.checkpoint.gamma2 * row.v_gram + 1e-9) << row.step;
    EXPECT_NEAR(row.loss, -row.s2, 1e-12);
    EXPECT_NEAR(row.v_gram, row.avg_sq_norm - row.mixture_sq_norm, 1e-9);
    EXPECT_LE(row.min_eig, row.max_eig);
  }
}

TEST(Train, EntropyTrendsUpwardOnSphereMixture) {
  TrainConfig c;
  c.steps = 300;
  c.batch_distributions = 6;
  c.samples_per_distribution = 32;
  c.seed = 1;
  KernelConfig k;
  k.gamma2 = 3.0;
  const auto r = train(synth_sphere_mixture(6, 200, 3, 0.5, 1), EncoderKind::kMlp, c, k);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(r.log.size());
  for (const auto& row : r.log) {
    const double x = static_cast<double>(row.step);
    sx += x;
    sy += row.s2;
    sxx += x * x;
    sxy += x * row.s2;
  }
  EXPECT_GT((n * sxy - sx * sy) / (n * sxx - sx * sx), 0.0);
  double first = 0, last = 0;
  for (std::size_t i = 0; i < 10; ++i) first += r.log[i].s2 / 10;
  for (std::size_t i = 200; i < 300; ++i) last += r.log[i].s2 / 100;
  EXPECT_GT(last, first);
}

TEST(Train, TableEncoderOnHistograms) {
  auto c = small_config();
  c.latent_dim = 4;
  c.lr = 0.05;
  const auto ds = histogram_dataset(10, 12, 8);
  const auto r = train(ds, EncoderKind::kTable, c, fixed_kernel());
  const auto& e = std::get<TableEncoder>(r.checkpoint.encoder).embeddings();
  EXPECT_EQ(e.rows(), 12);
  for (Eigen::Index i = 0; i < e.rows(); ++i) EXPECT_NEAR(e.row(i).norm(), 1.0, 1e-6);
  EXPECT_THROW(train(ds, EncoderKind::kMlp, c, fixed_kernel()), std::invalid_argument);
  EXPECT_THROW(train(synth_sphere_mixture(6, 10, 3, 0.5, 1), EncoderKind::kTable, c, fixed_kernel()),
               std::invalid_argument);
}

TEST(Train, FullReportMatchesExactEncoding) {
  const auto ds = synth_sphere_mixture(6, 20, 3, 0.5, 9);
  const auto r = train(ds, EncoderKind::kMlp, small_config(), fixed_kernel());
  ASSERT_TRUE(r.full_report.has_value());
  Rng unused(0);
  const auto enc = encode_dataset(r.checkpoint.encoder, ds, 0, unused);
  const auto expected = entropy_report(enc, 2.0, DistributionKernel::kGaussian, 3.0);
  EXPECT_EQ(r.full_report->s2, expected.s2);
  EXPECT_EQ(r.full_report->eigenvalues.size(), 6);
  auto c = small_config();
  c.full_report = false;
  EXPECT_FALSE(train(ds, EncoderKind::kMlp, c, fixed_kernel()).full_report.has_value());
}

TEST(Train, RejectsBatchLargerThanDataset) {
  auto c = small_config();
  c.batch_distributions = 7;
  EXPECT_THROW(train(synth_sphere_mixture(6, 10, 3, 0.5, 1), EncoderKind::kMlp, c, fixed_kernel()),
               std::invalid_argument);
}

TEST(Train, VarianceObjectiveRaisesVariance) {
  auto c = small_config();
  c.steps = 100;
  c.lr = 5e-3;
  c.objective = Objective::kVariance;
  const auto r = train(synth_sphere_mixture(6, 40, 3, 0.5, 3), EncoderKind::kMlp, c, fixed_kernel());
  double first = 0, last = 0;
  for (std::size_t i = 0; i < 10; ++i) first += r.log[i].v_gram / 10;
  for (std::size_t i = 90; i < 100; ++i) last += r.log[i].v_gram / 10;
  EXPECT_GT(last, first);
  EXPECT_NEAR(r.log[0].loss, -r.log[0].v_gram, 1e-12);
}

TEST(MetricsCsv, HeaderAndRows) {
  MetricRow row;
  row.step = 2;
  row.loss = -0.5;
  row.s2 = 0.5;
  const auto csv = metrics_csv({row});
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "step,loss,s2_nats,v_gram,avg_sq_norm,mixture_sq_norm,min_eig,max_eig");
  EXPECT_NE(csv.find("\n2,-0.5,0.5,0,0,0,0,0\n"), std::string::npos);
}

}  // namespace
}  // namespace mdke
