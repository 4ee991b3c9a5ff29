#include "mdke/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace mdke {

double mean_nearest_neighbor_distance(const Eigen::MatrixXd& points) {
  const auto n = points.rows();
  if (n < 2) throw std::invalid_argument("mean_nearest_neighbor_distance: need >= 2 points");
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      best = std::min(best, (points.row(i) - points.row(j)).squaredNorm());
    }
    total += std::sqrt(best);
  }
  return total / static_cast<double>(n);
}

double bandwidth_heuristic(std::size_t n_points, Eigen::Index dim, Rng& rng, double multiplier,
                           std::size_t mc_draws) {
  if (n_points < 2) throw std::invalid_argument("bandwidth_heuristic: n_points must be >= 2");
  if (dim < 2) throw std::invalid_argument("bandwidth_heuristic: dim must be >= 2");
  if (mc_draws < 1 || !(multiplier > 0.0))
    throw std::invalid_argument("bandwidth_heuristic: bad multiplier or draw count");
  double acc = 0.0;
  for (std::size_t r = 0; r < mc_draws; ++r) {
    Eigen::MatrixXd pts(static_cast<Eigen::Index>(n_points), dim);
    for (Eigen::Index i = 0; i < pts.rows(); ++i) pts.row(i) = rng.unit_vector(dim).transpose();
    acc += mean_nearest_neighbor_distance(pts);
  }
  const double mean_nn = acc / static_cast<double>(mc_draws);
  return 1.0 / (multiplier * mean_nn);
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty set");
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    m = 0.5 * (m + lower);
  }
  return m;
}

}  // namespace

double median_heuristic_gamma(const DistributionDataset& dataset, Rng& rng, std::size_t max_points) {
  std::vector<Eigen::RowVectorXd> pool;
  for (const auto& d : dataset.distributions())
    for (Eigen::Index i = 0; i < d.size(); ++i) pool.push_back(d.samples().row(i));
  std::vector<std::size_t> pick;
  if (pool.size() > max_points) {
    pick = rng.sample_without_replacement(pool.size(), max_points);
  } else {
    pick.resize(pool.size());
    for (std::size_t k = 0; k < pick.size(); ++k) pick[k] = k;
  }
  std::vector<double> sq;
  for (std::size_t a = 0; a < pick.size(); ++a)
    for (std::size_t b = a + 1; b < pick.size(); ++b)
      sq.push_back((pool[pick[a]] - pool[pick[b]]).squaredNorm());
  const double med = median(std::move(sq));
  if (!(med > 0.0)) throw std::runtime_error("median_heuristic_gamma: degenerate samples");
  return 1.0 / med;
}

double median_inverse_gamma(const Eigen::MatrixXd& squared_distances) {
  std::vector<double> v;
  for (Eigen::Index i = 0; i < squared_distances.rows(); ++i)
    for (Eigen::Index j = i + 1; j < squared_distances.cols(); ++j) v.push_back(squared_distances(i, j));
  const double med = median(std::move(v));
  if (!(med > 0.0)) throw std::runtime_error("median_inverse_gamma: all distances are zero");
  return 1.0 / med;
}

double sw_lambda_heuristic(const DistributionDataset& dataset, int p, double multiplier) {
  Eigen::MatrixXd means(static_cast<Eigen::Index>(dataset.size()), dataset.input_dim());
  for (std::size_t i = 0; i < dataset.size(); ++i)
    means.row(static_cast<Eigen::Index>(i)) = dataset[i].samples().colwise().mean();
  const double nn = mean_nearest_neighbor_distance(means);
  if (!(nn > 0.0)) throw std::runtime_error("sw_lambda_heuristic: coincident distribution means");
  return 1.0 / (multiplier * std::pow(nn, p));
}

}  // namespace mdke
