#pragma once

#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "mdke/kernels.hpp"

namespace mdke {

/// S2 = -ln ||K / M||_F^2 in nats. Uses the Frobenius norm; no eigensolve.
double renyi2_entropy(const Eigen::MatrixXd& k);

/// ln ||K / M||_F^2, i.e. -renyi2_entropy(K).
double mdke_loss(const Eigen::MatrixXd& k);

/// Cholesky factor of K / M + jitter * I, with the jitter that finally worked.
struct LogDetFactor {
  double value = 0.0;   // -ln det(K / M + jitter I)
  double jitter = 0.0;  // jitter actually applied
  Eigen::LLT<Eigen::MatrixXd> llt;
};

/// Factorizes K / M + jitter I, escalating the jitter by 10x up to three
/// times (a zero starting jitter escalates from 1e-8). Throws NumericalError
/// if every attempt fails.
LogDetFactor factorize_logdet(const Eigen::MatrixXd& k, double jitter);

/// -ln det(K / M + jitter I).
double logdet_regularizer(const Eigen::MatrixXd& k, double jitter);

/// mdke_loss + epsilon * logdet_regularizer; the regularizer is skipped
/// entirely when epsilon == 0.
double mdke_r_loss(const Eigen::MatrixXd& k, double epsilon, double jitter);

/// Three independent routes to the distributional variance of a mean-embedding
/// Gram: trace form, mean-norm minus mixture-norm form, and half the mean
/// pairwise squared distance.
struct VarianceTriple {
  double v_gram = 0.0;
  double v_gap = 0.0;
  double j_half = 0.0;
};

VarianceTriple distributional_variance(const Eigen::MatrixXd& g);

struct BoundReport {
  double lhs = 0.0;  // S2 / (2 gamma2)
  double rhs = 0.0;  // distributional variance
  double slack = 0.0;
};

/// Checks S2 / (2 gamma2) <= V. Only valid for the gaussian family; any other
/// family raises std::invalid_argument.
BoundReport entropy_bound_check(const Eigen::MatrixXd& k, const Eigen::MatrixXd& g, double gamma2,
                                DistributionKernel family);

struct GeneralizedVariance {
  double var_h = 0.0;           // mean_a |phi(z_a) - mu|^2 via kernel expansion
  double one_minus_norm = 0.0;  // 1 - |mu|^2
};

GeneralizedVariance generalized_variance(const WeightedPoints& p, double gamma1);

/// Eigenvalues of K / M, descending.
Eigen::VectorXd spectrum_report(const Eigen::MatrixXd& k);

/// |mu_mix|^2 of the uniform mixture, computed by pooling every encoded
/// sample into one distribution with weights w / M.
double pooled_mixture_sq_norm(std::span<const WeightedPoints> encoded, double gamma1);

struct EntropyReport {
  double s2 = 0.0;
  double v_gram = 0.0;
  double v_gap = 0.0;
  double j_half = 0.0;
  double bound_rhs = 0.0;  // 2 gamma2 v_gram
  double avg_sq_norm = 0.0;
  double mixture_sq_norm = 0.0;
  Eigen::VectorXd eigenvalues;
};

/// All diagnostics for one encoded dataset with a normalized MMD family.
EntropyReport entropy_report(std::span<const WeightedPoints> encoded, double gamma1,
                             DistributionKernel family, double gamma2, unsigned threads = 1);

/// Same, from precomputed G and K_D (mixture norm taken from G).
EntropyReport entropy_report(const Eigen::MatrixXd& g, const Eigen::MatrixXd& k, double gamma2);

}  // namespace mdke
