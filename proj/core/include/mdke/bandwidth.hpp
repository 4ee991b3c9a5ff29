#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Core>

#include "mdke/dataset.hpp"
#include "mdke/random.hpp"

namespace mdke {

/// Mean over points of the Euclidean distance to the nearest other point
/// (rows are points). Brute force, O(n^2 d).
double mean_nearest_neighbor_distance(const Eigen::MatrixXd& points);

/// Latent-sphere bandwidth: gamma = 1 / (multiplier * meanNN), where meanNN is
/// the nearest-neighbour distance among `n_points` uniform points on S^{d-1},
/// averaged over `mc_draws` independent draws.
double bandwidth_heuristic(std::size_t n_points, Eigen::Index dim, Rng& rng,
                           double multiplier = 10.0, std::size_t mc_draws = 20);

/// Raw-space embedding bandwidth for the unlearned MMD baselines:
/// gamma = 1 / median |x - x'|^2 over pooled samples (at most `max_points`
/// drawn from the pool).
double median_heuristic_gamma(const DistributionDataset& dataset, Rng& rng,
                              std::size_t max_points = 1000);

/// Distribution-level bandwidth from a squared-distance matrix:
/// 1 / median of the off-diagonal entries.
double median_inverse_gamma(const Eigen::MatrixXd& squared_distances);

/// Lambda for the sliced Wasserstein kernels: 1 / (multiplier * meanNN^p),
/// meanNN taken over the per-distribution sample means in raw space.
double sw_lambda_heuristic(const DistributionDataset& dataset, int p, double multiplier = 10.0);

}  // namespace mdke
