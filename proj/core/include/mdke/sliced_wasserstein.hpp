#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "mdke/dataset.hpp"
#include "mdke/kernels.hpp"
#include "mdke/random.hpp"

namespace mdke {

/// L directions drawn uniformly on S^{d-1}, one per row.
Eigen::MatrixXd random_directions(std::size_t count, Eigen::Index dim, Rng& rng);

/// Values of the sorted sample at `count` equally spaced quantile levels
/// t_k = k / (count - 1), by linear interpolation of the order statistics.
std::vector<double> resample_quantiles(std::vector<double> sorted, std::size_t count);

/// One-dimensional W_p^p between two empirical samples. When sizes differ both
/// are resampled to max(n_x, n_y) quantiles first.
double wasserstein_1d_pow(std::vector<double> x, std::vector<double> y, int p);

struct SlicedWassersteinEstimate {
  double value = 0.0;           // mean over directions of W_p^p
  double standard_error = 0.0;  // sample std of per-direction values / sqrt(L)
};

/// SW_p^p averaged over the supplied directions (rows of `directions`).
SlicedWassersteinEstimate sliced_wasserstein_estimate(const Eigen::MatrixXd& p_samples,
                                                      const Eigen::MatrixXd& q_samples, int p,
                                                      const Eigen::MatrixXd& directions);

/// SW_p^p with `projections` fresh random directions.
double sliced_wasserstein(const Eigen::MatrixXd& p_samples, const Eigen::MatrixXd& q_samples, int p,
                          std::size_t projections, Rng& rng);

/// K_ij = exp(-lambda * SW_p^p(P_i, P_j)), one shared direction set for all pairs.
GramMatrix sw_kernel_gram(const DistributionDataset& dataset, int p, double lambda,
                          std::size_t projections, Rng& rng, unsigned threads = 1);

}  // namespace mdke
