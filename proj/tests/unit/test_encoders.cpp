#include <cmath>

#include <gtest/gtest.h>

#include "mdke/encoders.hpp"
#include "oracles.hpp"

namespace mdke {
namespace {

TEST(ProjectRows, ScalesToUnitNorm) {
  Eigen::MatrixXd m(1, 2);
  m << 3.0, 4.0;
  const auto p = project_rows_to_sphere(m);
  EXPECT_DOUBLE_EQ(p(0, 0), 0.6);
  EXPECT_DOUBLE_EQ(p(0, 1), 0.8);
}

TEST(ProjectRows, IdempotentOnUnitRows) {
  Rng rng(1);
  const Eigen::MatrixXd z = oracle::random_sphere_points(rng, 20, 4);
  const auto p = project_rows_to_sphere(z);
  EXPECT_LE((p - z).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((project_rows_to_sphere(p) - p).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ProjectRows, ZeroRowIsNudgedToFirstAxis) {
  const auto p = project_rows_to_sphere(Eigen::MatrixXd::Zero(1, 3));
  EXPECT_DOUBLE_EQ(p(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(p(0, 1), 0.0);
}

TEST(TableEncoder, LookupReturnsRows) {
  Rng rng(2);
  const Eigen::MatrixXd e = oracle::random_sphere_points(rng, 5, 3);
  const TableEncoder t(e);
  const std::vector<std::size_t> idx{4, 1, 1};
  const auto z = t.encode(idx);
  EXPECT_TRUE((z.row(0).array() == e.row(4).array()).all());
  EXPECT_TRUE((z.row(2).array() == e.row(1).array()).all());
  const std::vector<std::size_t> bad{5};
  EXPECT_THROW(t.encode(bad), std::out_of_range);
}

TEST(TableEncoder, HistogramEncodingKeepsWeights) {
  Rng rng(3);
  const Encoder enc = TableEncoder(oracle::random_sphere_points(rng, 4, 2));
  const IndexHistogram h{"h", {0, 3}, {0.25, 0.75}, std::nullopt};
  const auto wp = encode(enc, make_input(h));
  EXPECT_EQ(wp.size(), 2);
  EXPECT_DOUBLE_EQ(wp.weights(1), 0.75);
}

TEST(TableEncoder, RetractionRestoresUnitRows) {
  Encoder enc = init_encoder(EncoderKind::kTable, {6, 0, 3}, 4);
  Eigen::VectorXd theta = flat_parameters(enc);
  theta *= 1.7;
  theta(0) += 0.3;
  set_flat_parameters(enc, theta);
  retract(enc);
  const auto& e = std::get<TableEncoder>(enc).embeddings();
  for (Eigen::Index i = 0; i < e.rows(); ++i) EXPECT_NEAR(e.row(i).norm(), 1.0, 1e-15);
}

TEST(MlpEncoder, ConstantMapWhenSecondLayerIsZero) {
  Eigen::VectorXd b2 = Eigen::VectorXd::Zero(3);
  b2(0) = 1.0;
  const MlpEncoder m(Eigen::MatrixXd::Random(4, 2), Eigen::VectorXd::Random(4), Eigen::MatrixXd::Zero(3, 4), b2);
  const auto z = m.encode(Eigen::MatrixXd::Random(7, 2));
  for (Eigen::Index i = 0; i < 7; ++i) {
    EXPECT_DOUBLE_EQ(z(i, 0), 1.0);
    EXPECT_DOUBLE_EQ(z(i, 1), 0.0);
  }
}

TEST(MlpEncoder, OutputsAreUnitNorm) {
  const Encoder enc = init_encoder(EncoderKind::kMlp, {5, 16, 4}, 5);
  Rng rng(6);
  const auto z = std::get<MlpEncoder>(enc).encode(rng.normal_matrix(50, 5) * 3.0);
  for (Eigen::Index i = 0; i < z.rows(); ++i) EXPECT_NEAR(z.row(i).norm(), 1.0, 1e-9);
}

TEST(MlpEncoder, ZeroPreactivationFallsBackToFirstAxis) {
  const MlpEncoder m(Eigen::MatrixXd::Zero(2, 2), Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Zero(3, 2),
                     Eigen::VectorXd::Zero(3));
  const auto z = m.encode(Eigen::MatrixXd::Ones(1, 2));
  EXPECT_DOUBLE_EQ(z(0, 0), 1.0);
}

TEST(MlpEncoder, RejectsWrongInputWidth) {
  const Encoder enc = init_encoder(EncoderKind::kMlp, {3, 4, 2}, 7);
  EXPECT_THROW(std::get<MlpEncoder>(enc).encode(Eigen::MatrixXd::Ones(2, 4)), std::invalid_argument);
}

TEST(MlpEncoder, EncodeIsPure) {
  const Encoder enc = init_encoder(EncoderKind::kMlp, {3, 8, 3}, 8);
  Rng rng(9);
  const Eigen::MatrixXd x = rng.normal_matrix(10, 3);
  const auto& m = std::get<MlpEncoder>(enc);
  EXPECT_TRUE((m.encode(x).array() == m.encode(x).array()).all());
}

TEST(InitEncoder, SameSeedSameParameters) {
  for (auto kind : {EncoderKind::kTable, EncoderKind::kMlp}) {
    const auto a = flat_parameters(init_encoder(kind, {6, 5, 3}, 11));
    const auto b = flat_parameters(init_encoder(kind, {6, 5, 3}, 11));
    const auto c = flat_parameters(init_encoder(kind, {6, 5, 3}, 12));
    EXPECT_TRUE((a.array() == b.array()).all());
    EXPECT_FALSE((a.array() == c.array()).all());
  }
}

TEST(InitEncoder, TableRowsUniformOnSphere) {
  const Encoder enc = init_encoder(EncoderKind::kTable, {10000, 0, 3}, 13);
  const auto& e = std::get<TableEncoder>(enc).embeddings();
  for (Eigen::Index i = 0; i < e.rows(); ++i) ASSERT_NEAR(e.row(i).norm(), 1.0, 1e-12);
  EXPECT_LT(e.colwise().mean().norm(), 0.05);
}

TEST(InitEncoder, MlpGlorotUniformWithZeroBiases) {
  const Encoder enc = init_encoder(EncoderKind::kMlp, {3, 10, 4}, 14);
  const auto& m = std::get<MlpEncoder>(enc);
  EXPECT_LE(m.w1().cwiseAbs().maxCoeff(), std::sqrt(6.0 / 13.0));
  EXPECT_LE(m.w2().cwiseAbs().maxCoeff(), std::sqrt(6.0 / 14.0));
  EXPECT_GT(m.w1().cwiseAbs().maxCoeff(), 0.5 * std::sqrt(6.0 / 13.0));
  EXPECT_TRUE(m.b1().isZero(0.0));
  EXPECT_TRUE(m.b2().isZero(0.0));
}

TEST(Parameters, ShapesAndFlatRoundTrip) {
  const Encoder enc = init_encoder(EncoderKind::kMlp, {3, 5, 2}, 15);
  const auto shapes = parameter_shapes(enc);
  ASSERT_EQ(shapes.size(), 4u);
  EXPECT_EQ(shapes[0].name, "w1");
  EXPECT_EQ(shapes[0].rows, 5);
  EXPECT_EQ(shapes[0].cols, 3);
  Eigen::Index total = 0;
  for (const auto& s : shapes) total += s.size();
  const auto theta = flat_parameters(enc);
  EXPECT_EQ(theta.size(), total);
  Encoder copy = init_encoder(EncoderKind::kMlp, {3, 5, 2}, 99);
  set_flat_parameters(copy, theta);
  EXPECT_TRUE((flat_parameters(copy).array() == theta.array()).all());
  EXPECT_EQ(kind_of(copy), EncoderKind::kMlp);
  EXPECT_EQ(latent_dim(copy), 2);
  EXPECT_THROW(set_flat_parameters(copy, Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST(EncoderKindNames, RoundTrip) {
  EXPECT_EQ(parse_encoder_kind("table"), EncoderKind::kTable);
  EXPECT_EQ(parse_encoder_kind(to_string(EncoderKind::kMlp)), EncoderKind::kMlp);
  EXPECT_THROW(parse_encoder_kind("cnn"), std::invalid_argument);
}

}  // namespace
}  // namespace mdke
