#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace mdke {

/// Second-level kernel between mean embeddings (or, for the sliced
/// Wasserstein baselines, between raw sample clouds).
enum class DistributionKernel { kLinear, kGaussian, kCauchy, kImq, kSw1, kSw2 };

std::string to_string(DistributionKernel family);
DistributionKernel parse_distribution_kernel(const std::string& name);

/// Families with K(P, P) = 1.
bool is_normalized(DistributionKernel family);
/// Families that are a function of squared MMD and therefore differentiable
/// through the mean-embedding path.
bool is_mmd_family(DistributionKernel family);

struct KernelConfig {
  std::optional<double> gamma1;  // embedding-kernel bandwidth; nullopt = auto
  DistributionKernel family = DistributionKernel::kGaussian;
  std::optional<double> gamma2;  // distribution-kernel bandwidth; nullopt = auto
  std::size_t sw_projections = 100;
  double jitter = 1e-8;
};

/// An encoded distribution: n points with probability weights summing to one.
/// Empirical distributions carry uniform weights 1/n.
struct WeightedPoints {
  Eigen::MatrixXd points;
  Eigen::VectorXd weights;

  Eigen::Index size() const { return points.rows(); }
  Eigen::Index dim() const { return points.cols(); }
};

WeightedPoints uniform_points(Eigen::MatrixXd points);

/// Returns a copy with rows sorted lexicographically by (coordinates, weight).
/// Accumulating kernel sums in this order makes them invariant, bit for bit,
/// to the order in which samples were supplied.
WeightedPoints canonical_order(const WeightedPoints& p);

enum class GramKind { kMeanEmbedding, kDistributionKernel };

struct GramMatrix {
  Eigen::MatrixXd values;
  GramKind kind = GramKind::kDistributionKernel;
  std::vector<std::string> ids;

  Eigen::Index size() const { return values.rows(); }
};

/// exp(-(gamma1 / 2) * |z - z'|^2)
double embedding_kernel(const Eigen::Ref<const Eigen::RowVectorXd>& z,
                        const Eigen::Ref<const Eigen::RowVectorXd>& z_prime, double gamma1);

/// V-statistic estimate of <mu_P, mu_Q>: sum_a sum_b w_a v_b k(z_a, z'_b).
double mean_inner(const WeightedPoints& p, const WeightedPoints& q, double gamma1);

/// Squared MMD from the three inner products, clamped at zero from below.
double mmd_sq_from_inner(double pp, double qq, double pq);
double mmd_sq(const WeightedPoints& p, const WeightedPoints& q, double gamma1);

/// Maps a squared MMD to a distribution-kernel value:
///   gaussian exp(-(g/2) d2), cauchy 1/(1 + g d2), imq (1 + g d2)^(-1/2).
/// The linear family is not a function of d2 and is rejected here.
double distribution_kernel_value(double d2, DistributionKernel family, double gamma2);

/// d K / d (d2) for the same families.
double distribution_kernel_slope(double d2, DistributionKernel family, double gamma2);

/// M x M Gram of mean-embedding inner products. Pairs are independent and may
/// be spread over `threads` workers; each pair's sum uses the canonical order,
/// so the result does not depend on the thread count.
Eigen::MatrixXd mean_embedding_gram(std::span<const WeightedPoints> encoded, double gamma1,
                                    unsigned threads = 1);

/// Squared MMD matrix derived from G (zero diagonal, clamped, symmetric).
Eigen::MatrixXd mmd_sq_matrix(const Eigen::MatrixXd& inner);

/// K_D from the mean-embedding Gram. For the linear family K_D = G.
Eigen::MatrixXd distribution_kernel_matrix(const Eigen::MatrixXd& inner, DistributionKernel family,
                                           double gamma2);

/// Full pipeline: G once, then d2, then the family map. Requires resolved
/// bandwidths and an MMD family.
GramMatrix distribution_gram(std::span<const WeightedPoints> encoded,
                             const std::vector<std::string>& ids, DistributionKernel family,
                             double gamma1, double gamma2, unsigned threads = 1);

}  // namespace mdke
