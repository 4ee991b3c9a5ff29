#include "mdke/objective.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "mdke/errors.hpp"

namespace mdke {

namespace {

void require_square(const Eigen::MatrixXd& k, const char* who) {
  if (k.rows() != k.cols() || k.rows() == 0)
    throw std::invalid_argument(std::string(who) + ": Gram matrix must be square and non-empty");
}

double sum_sq_over_m2(const Eigen::MatrixXd& k) {
  const double m = static_cast<double>(k.rows());
  double total = 0.0;
  for (Eigen::Index i = 0; i < k.rows(); ++i)
    for (Eigen::Index j = 0; j < k.cols(); ++j) total += k(i, j) * k(i, j);
  return total / (m * m);
}

}  // namespace

double renyi2_entropy(const Eigen::MatrixXd& k) {
  require_square(k, "renyi2_entropy");
  return -std::log(sum_sq_over_m2(k));
}

double mdke_loss(const Eigen::MatrixXd& k) {
  require_square(k, "mdke_loss");
  return std::log(sum_sq_over_m2(k));
}

LogDetFactor factorize_logdet(const Eigen::MatrixXd& k, double jitter) {
  require_square(k, "logdet_regularizer");
  if (jitter < 0.0) throw std::invalid_argument("logdet_regularizer: jitter must be >= 0");
  const auto m = k.rows();
  const Eigen::MatrixXd scaled = k / static_cast<double>(m);
  double j = jitter;
  for (int attempt = 0; attempt < 4; ++attempt) {
    if (attempt > 0) j = j > 0.0 ? j * 10.0 : 1e-8;
    Eigen::MatrixXd a = scaled;
    a.diagonal().array() += j;
    LogDetFactor out;
    out.llt.compute(a);
    if (out.llt.info() != Eigen::Success) continue;
    const auto diag = out.llt.matrixLLT().diagonal();
    if ((diag.array() <= 0.0).any() || !diag.allFinite()) continue;
    out.value = -2.0 * diag.array().log().sum();
    out.jitter = j;
    return out;
  }
  throw NumericalError("log-det factorization failed after jitter escalation to " +
                       std::to_string(j) + "; Gram matrix is numerically not PSD");
}

double logdet_regularizer(const Eigen::MatrixXd& k, double jitter) {
  return factorize_logdet(k, jitter).value;
}

double mdke_r_loss(const Eigen::MatrixXd& k, double epsilon, double jitter) {
  if (epsilon < 0.0) throw std::invalid_argument("mdke_r_loss: epsilon must be >= 0");
  const double base = mdke_loss(k);
  if (epsilon == 0.0) return base;
  return base + epsilon * logdet_regularizer(k, jitter);
}

VarianceTriple distributional_variance(const Eigen::MatrixXd& g) {
  require_square(g, "distributional_variance");
  const auto m = g.rows();
  const double md = static_cast<double>(m);

  // Trace form.
  double trace = 0.0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    trace += g(i, i);
    for (Eigen::Index j = 0; j < m; ++j) total += g(i, j);
  }
  VarianceTriple out;
  out.v_gram = trace / md - total / (md * md);

  // Mean squared norm minus squared norm of the mixture embedding, the latter
  // as the mean of per-row means.
  double mean_norm = 0.0;
  double mixture = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    mean_norm += g(i, i) / md;
    double row = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) row += g(i, j);
    mixture += (row / md) / md;
  }
  out.v_gap = mean_norm - mixture;

  // Half the mean pairwise squared embedding distance.
  double pairwise = 0.0;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) pairwise += g(i, i) + g(j, j) - 2.0 * g(i, j);
  out.j_half = pairwise / (2.0 * md * md);
  return out;
}

BoundReport entropy_bound_check(const Eigen::MatrixXd& k, const Eigen::MatrixXd& g, double gamma2,
                                DistributionKernel family) {
  if (family != DistributionKernel::kGaussian)
    throw std::invalid_argument("entropy bound holds only for the gaussian distribution kernel, got '" +
                                to_string(family) + "'");
  if (!(gamma2 > 0.0)) throw std::invalid_argument("entropy_bound_check: gamma2 must be > 0");
  if (k.rows() != g.rows() || k.cols() != g.cols())
    throw std::invalid_argument("entropy_bound_check: K and G differ in shape");
  BoundReport out;
  out.lhs = renyi2_entropy(k) / (2.0 * gamma2);
  out.rhs = distributional_variance(g).v_gram;
  out.slack = out.rhs - out.lhs;
  return out;
}

GeneralizedVariance generalized_variance(const WeightedPoints& p, double gamma1) {
  const WeightedPoints c = canonical_order(p);
  const auto n = c.size();
  // Row sums r_a = sum_b w_b k(z_a, z_b).
  Eigen::VectorXd r(n);
  for (Eigen::Index a = 0; a < n; ++a) {
    double s = 0.0;
    for (Eigen::Index b = 0; b < n; ++b)
      s += c.weights(b) * embedding_kernel(c.points.row(a), c.points.row(b), gamma1);
    r(a) = s;
  }
  double norm = 0.0;
  for (Eigen::Index a = 0; a < n; ++a) norm += c.weights(a) * r(a);
  double var = 0.0;
  for (Eigen::Index a = 0; a < n; ++a) {
    const double self = embedding_kernel(c.points.row(a), c.points.row(a), gamma1);
    var += c.weights(a) * (self - 2.0 * r(a) + norm);
  }
  return {var, 1.0 - mean_inner(p, p, gamma1)};
}

Eigen::VectorXd spectrum_report(const Eigen::MatrixXd& k) {
  require_square(k, "spectrum_report");
  const Eigen::MatrixXd scaled = k / static_cast<double>(k.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(scaled, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("spectrum_report: eigensolver failed");
  return solver.eigenvalues().reverse();
}

double pooled_mixture_sq_norm(std::span<const WeightedPoints> encoded, double gamma1) {
  if (encoded.empty()) throw std::invalid_argument("pooled_mixture_sq_norm: empty dataset");
  Eigen::Index total = 0;
  for (const auto& p : encoded) total += p.size();
  const auto d = encoded.front().dim();
  WeightedPoints pool{Eigen::MatrixXd(total, d), Eigen::VectorXd(total)};
  const double m = static_cast<double>(encoded.size());
  Eigen::Index row = 0;
  for (const auto& p : encoded) {
    pool.points.middleRows(row, p.size()) = p.points;
    pool.weights.segment(row, p.size()) = p.weights / m;
    row += p.size();
  }
  return mean_inner(pool, pool, gamma1);
}

EntropyReport entropy_report(const Eigen::MatrixXd& g, const Eigen::MatrixXd& k, double gamma2) {
  require_square(g, "entropy_report");
  EntropyReport out;
  out.s2 = renyi2_entropy(k);
  const auto var = distributional_variance(g);
  out.v_gram = var.v_gram;
  out.v_gap = var.v_gap;
  out.j_half = var.j_half;
  out.bound_rhs = 2.0 * gamma2 * var.v_gram;
  out.avg_sq_norm = g.diagonal().mean();
  out.mixture_sq_norm = g.sum() / static_cast<double>(g.rows() * g.rows());
  out.eigenvalues = spectrum_report(k);
  return out;
}

EntropyReport entropy_report(std::span<const WeightedPoints> encoded, double gamma1,
                             DistributionKernel family, double gamma2, unsigned threads) {
  const Eigen::MatrixXd g = mean_embedding_gram(encoded, gamma1, threads);
  const Eigen::MatrixXd k = distribution_kernel_matrix(g, family, gamma2);
  EntropyReport out = entropy_report(g, k, gamma2);
  out.mixture_sq_norm = pooled_mixture_sq_norm(encoded, gamma1);
  return out;
}

}  // namespace mdke
