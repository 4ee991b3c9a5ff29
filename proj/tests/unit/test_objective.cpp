#include <cmath>

#include <gtest/gtest.h>

#include "mdke/errors.hpp"
#include "mdke/objective.hpp"
#include "oracles.hpp"

namespace mdke {
namespace {

TEST(Renyi2Entropy, Endpoints) {
  EXPECT_NEAR(renyi2_entropy(Eigen::MatrixXd::Identity(4, 4)), std::log(4.0), 1e-15);
  EXPECT_NEAR(renyi2_entropy(Eigen::MatrixXd::Identity(4, 4)), 1.386294, 1e-6);
  EXPECT_NEAR(renyi2_entropy(Eigen::MatrixXd::Ones(7, 7)), 0.0, 1e-15);
}

TEST(Renyi2Entropy, MatchesEigenvalueOracle) {
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    const Eigen::MatrixXd k = oracle::random_correlation(rng, 5, 3);
    EXPECT_NEAR(renyi2_entropy(k), oracle::entropy_by_eigen(k), 1e-10);
  }
}

TEST(Renyi2Entropy, PermutationInvariant) {
  Rng rng(2);
  const Eigen::MatrixXd k = oracle::random_correlation(rng, 6, 6);
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(6);
  perm.indices() << 2, 5, 0, 1, 4, 3;
  const Eigen::MatrixXd pk = perm * k * perm.transpose();
  EXPECT_NEAR(renyi2_entropy(pk), renyi2_entropy(k), 1e-12);
}

TEST(Renyi2Entropy, RejectsNonSquare) { EXPECT_THROW(renyi2_entropy(Eigen::MatrixXd::Ones(2, 3)), std::invalid_argument); }

TEST(Renyi2Entropy, BoundedByLogM) {
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const Eigen::Index m = 2 + static_cast<Eigen::Index>(rng.index(10));
    const Eigen::MatrixXd k = oracle::random_correlation(rng, m, 1 + static_cast<Eigen::Index>(rng.index(6)));
    const double s2 = renyi2_entropy(k);
    EXPECT_GE(s2, -1e-12);
    EXPECT_LE(s2, std::log(static_cast<double>(m)) + 1e-12);
  }
}

TEST(MdkeLoss, NegatesEntropy) {
  EXPECT_NEAR(mdke_loss(Eigen::MatrixXd::Identity(5, 5)), -std::log(5.0), 1e-15);
  EXPECT_NEAR(mdke_loss(Eigen::MatrixXd::Ones(3, 3)), 0.0, 1e-15);
  Rng rng(4);
  const Eigen::MatrixXd k = oracle::random_correlation(rng, 6, 2);
  EXPECT_EQ(mdke_loss(k) + renyi2_entropy(k), 0.0);
}

TEST(LogDetRegularizer, IdentityAndScaledIdentity) {
  EXPECT_NEAR(logdet_regularizer(Eigen::MatrixXd::Identity(4, 4), 0.0), 4.0 * std::log(4.0), 1e-12);
  EXPECT_NEAR(logdet_regularizer(Eigen::MatrixXd::Identity(4, 4), 0.0), 5.545177, 1e-6);
  EXPECT_NEAR(logdet_regularizer(2.0 * Eigen::MatrixXd::Identity(2, 2), 0.0), 0.0, 1e-15);
}

TEST(LogDetRegularizer, SingularWithJitterIsLargeAndFinite) {
  const double v = logdet_regularizer(Eigen::MatrixXd::Ones(4, 4), 1e-8);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_GE(v, 20.0);
  // -ln det(J/4 + 1e-8 I) = -ln(1 + 1e-8) - 3 ln(1e-8)
  EXPECT_NEAR(v, -std::log(1.0 + 1e-8) - 3.0 * std::log(1e-8), 1e-6);
}

TEST(LogDetRegularizer, EscalatesJitterOnIndefiniteInput) {
  Eigen::MatrixXd k = Eigen::MatrixXd::Identity(3, 3);
  k(0, 0) = -3e-9;
  const auto f = factorize_logdet(k, 0.0);
  EXPECT_GT(f.jitter, 0.0);
  EXPECT_TRUE(std::isfinite(f.value));
}

TEST(LogDetRegularizer, FailsOnStronglyIndefiniteInput) {
  Eigen::MatrixXd k = Eigen::MatrixXd::Identity(2, 2);
  k(1, 1) = -1.0;
  EXPECT_THROW(logdet_regularizer(k, 1e-8), NumericalError);
}

TEST(MdkeRLoss, Components) {
  const Eigen::MatrixXd i4 = Eigen::MatrixXd::Identity(4, 4);
  EXPECT_NEAR(mdke_r_loss(i4, 0.1, 0.0), -std::log(4.0) + 0.4 * std::log(4.0), 1e-12);
  EXPECT_NEAR(mdke_r_loss(i4, 0.1, 0.0), -0.831777, 1e-6);
  Rng rng(5);
  const Eigen::MatrixXd k = oracle::random_correlation(rng, 5, 5);
  EXPECT_EQ(mdke_r_loss(k, 0.0, 1e-8), mdke_loss(k));
  EXPECT_LT(mdke_r_loss(k, 0.05, 0.0), mdke_r_loss(k, 0.2, 0.0));
  EXPECT_THROW(mdke_r_loss(k, -1.0, 0.0), std::invalid_argument);
}

TEST(DistributionalVariance, SmallCases) {
  const auto a = distributional_variance(Eigen::MatrixXd::Identity(2, 2));
  EXPECT_DOUBLE_EQ(a.v_gram, 0.5);
  EXPECT_DOUBLE_EQ(a.v_gap, 0.5);
  EXPECT_DOUBLE_EQ(a.j_half, 0.5);
  const auto b = distributional_variance(Eigen::MatrixXd::Ones(4, 4));
  EXPECT_EQ(b.v_gram, 0.0);
  EXPECT_EQ(b.v_gap, 0.0);
  EXPECT_EQ(b.j_half, 0.0);
}

TEST(DistributionalVariance, ThreeRoutesAgree) {
  Rng rng(6);
  for (int t = 0; t < 50; ++t) {
    std::vector<WeightedPoints> enc;
    for (int i = 0; i < 6; ++i) enc.push_back(oracle::random_cluster(rng, 5, 3, 0.6));
    const Eigen::MatrixXd g = oracle::inner_gram(enc, 1.0);
    const auto v = distributional_variance(g);
    EXPECT_NEAR(v.v_gram, v.v_gap, 1e-12);
    EXPECT_NEAR(v.v_gram, v.j_half, 1e-12);
  }
}

TEST(EntropyBound, DegenerateEquality) {
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(3, 3);
  const auto b = entropy_bound_check(ones, ones, 2.0, DistributionKernel::kGaussian);
  EXPECT_NEAR(b.slack, 0.0, 1e-15);
}

TEST(EntropyBound, TwoDistributionClosedForm) {
  // M = 2: S2 = -ln((1 + k^2) / 2), V = d2 / 4, 2 g2 V = -ln k, so the slack is
  // ln((1 + k^2) / (2k)) / (2 g2), zero only when k = 1.
  Rng rng(7);
  for (int t = 0; t < 50; ++t) {
    const auto p = oracle::random_encoded(rng, 6, 3);
    WeightedPoints q = p;
    const Eigen::Matrix3d r = Eigen::AngleAxisd(rng.uniform() * 3.0, Eigen::Vector3d::UnitZ()).toRotationMatrix();
    q.points = p.points * r.transpose();
    std::vector<WeightedPoints> enc{p, q};
    const Eigen::MatrixXd g = oracle::inner_gram(enc, 1.3);
    const Eigen::MatrixXd k = oracle::gram(enc, DistributionKernel::kGaussian, 1.3, 0.7);
    const auto b = entropy_bound_check(k, g, 0.7, DistributionKernel::kGaussian);
    const double kk = k(0, 1);
    EXPECT_NEAR(b.slack, std::log((1.0 + kk * kk) / (2.0 * kk)) / (2.0 * 0.7), 1e-12);
    EXPECT_GE(b.slack, -1e-9);
  }
}

TEST(EntropyBound, RandomEightDistributionInstances) {
  Rng rng(8);
  for (int t = 0; t < 1000; ++t) {
    std::vector<WeightedPoints> enc;
    for (int i = 0; i < 8; ++i) enc.push_back(oracle::random_cluster(rng, 4, 3, 0.2 + rng.uniform()));
    const double g1 = 0.2 + 4.0 * rng.uniform();
    const double g2 = 0.1 + 10.0 * rng.uniform();
    const Eigen::MatrixXd g = mean_embedding_gram(enc, g1);
    const Eigen::MatrixXd k = distribution_kernel_matrix(g, DistributionKernel::kGaussian, g2);
    EXPECT_GE(entropy_bound_check(k, g, g2, DistributionKernel::kGaussian).slack, -1e-9);
  }
}

TEST(EntropyBound, RejectsNonGaussianFamilies) {
  const Eigen::MatrixXd i = Eigen::MatrixXd::Identity(2, 2);
  EXPECT_THROW(entropy_bound_check(i, i, 1.0, DistributionKernel::kCauchy), std::invalid_argument);
}

TEST(GeneralizedVariance, DiracAndAntipodalPair) {
  Eigen::MatrixXd one(1, 3);
  one << 0, 0, 1;
  const auto d = generalized_variance(uniform_points(one), 1.0);
  EXPECT_NEAR(d.var_h, 0.0, 1e-15);
  EXPECT_NEAR(d.one_minus_norm, 0.0, 1e-15);
  Eigen::MatrixXd two(2, 2);
  two << 1, 0, -1, 0;
  const auto a = generalized_variance(uniform_points(two), 1.0);
  const double expected = 1.0 - (1.0 + std::exp(-2.0)) / 2.0;
  EXPECT_NEAR(a.var_h, expected, 1e-15);
  EXPECT_NEAR(a.one_minus_norm, expected, 1e-15);
  EXPECT_NEAR(expected, 0.432332, 1e-6);
}

TEST(GeneralizedVariance, PathsAgreeOnRandomInputs) {
  Rng rng(9);
  for (int t = 0; t < 200; ++t) {
    const auto p = oracle::random_encoded(rng, 1 + static_cast<Eigen::Index>(rng.index(20)), 4, t % 2 == 0);
    const auto gv = generalized_variance(p, 0.3 + 3.0 * rng.uniform());
    EXPECT_NEAR(gv.var_h, gv.one_minus_norm, 1e-12);
  }
}

TEST(UniformVersusClustered, UniformHasSmallerNorm) {
  // Larger embedding norm means smaller variance: a uniform spread on the
  // sphere attains the smaller squared norm than any clustered distribution.
  Rng rng(10);
  const auto uniform = oracle::random_encoded(rng, 10000, 3);
  const auto clustered = oracle::random_cluster(rng, 10000, 3, 1.0);
  const double gamma1 = 2.0;
  // Exact value for uniform on S^2: (1 - e^{-2 g}) / (2 g); Monte-Carlo noise ~ 1e-3.
  const double nu = mean_inner(uniform, uniform, gamma1);
  EXPECT_NEAR(nu, (1.0 - std::exp(-2.0 * gamma1)) / (2.0 * gamma1), 5e-3);
  EXPECT_LT(nu + 0.02, mean_inner(clustered, clustered, gamma1));
}

TEST(SpectrumReport, KnownSpectra) {
  const auto e = spectrum_report(Eigen::MatrixXd::Identity(4, 4));
  for (Eigen::Index i = 0; i < 4; ++i) EXPECT_NEAR(e(i), 0.25, 1e-15);
  const auto o = spectrum_report(Eigen::MatrixXd::Ones(5, 5));
  EXPECT_NEAR(o(0), 1.0, 1e-12);
  for (Eigen::Index i = 1; i < 5; ++i) EXPECT_NEAR(o(i), 0.0, 1e-12);
}

TEST(SpectrumReport, DescendingAndTraceOne) {
  Rng rng(11);
  const Eigen::MatrixXd k = oracle::random_correlation(rng, 7, 4);
  const auto e = spectrum_report(k);
  for (Eigen::Index i = 1; i < e.size(); ++i) EXPECT_GE(e(i - 1), e(i));
  EXPECT_NEAR(e.sum(), k.trace() / 7.0, 1e-10);
  EXPECT_NEAR(e.sum(), 1.0, 1e-9);
}

TEST(PooledMixture, GapEqualsVariance) {
  Rng rng(12);
  for (int t = 0; t < 20; ++t) {
    std::vector<WeightedPoints> enc;
    for (int i = 0; i < 5; ++i) enc.push_back(oracle::random_cluster(rng, 6, 3, 0.5));
    const Eigen::MatrixXd g = mean_embedding_gram(enc, 1.5);
    const double avg = g.diagonal().mean();
    EXPECT_NEAR(avg - pooled_mixture_sq_norm(enc, 1.5), distributional_variance(g).v_gram, 1e-9);
  }
}

TEST(PooledMixture, UnequalCountsUseUniformMixture) {
  Rng rng(13);
  std::vector<WeightedPoints> enc{oracle::random_encoded(rng, 3, 3), oracle::random_encoded(rng, 9, 3)};
  const Eigen::MatrixXd g = oracle::inner_gram(enc, 1.0);
  EXPECT_NEAR(pooled_mixture_sq_norm(enc, 1.0), g.mean(), 1e-12);
}

TEST(EntropyReport, FieldsConsistent) {
  Rng rng(14);
  std::vector<WeightedPoints> enc;
  for (int i = 0; i < 6; ++i) enc.push_back(oracle::random_cluster(rng, 10, 3, 0.4));
  const auto r = entropy_report(enc, 2.0, DistributionKernel::kGaussian, 3.0);
  const Eigen::MatrixXd k = oracle::gram(enc, DistributionKernel::kGaussian, 2.0, 3.0);
  EXPECT_NEAR(r.s2, oracle::entropy_by_eigen(k), 1e-10);
  EXPECT_NEAR(r.bound_rhs, 2.0 * 3.0 * r.v_gram, 1e-15);
  EXPECT_LE(r.s2, r.bound_rhs + 1e-9);
  EXPECT_NEAR(r.avg_sq_norm - r.mixture_sq_norm, r.v_gram, 1e-9);
  EXPECT_NEAR(r.eigenvalues.sum(), 1.0, 1e-9);
}

}  // namespace
}  // namespace mdke
