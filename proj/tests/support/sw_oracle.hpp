#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "mdke/random.hpp"

namespace mdke::oracle {

// Independent reference: quantile function of the sorted projections at
// positions k/(n-1), then mean |x - y|^p over quantiles, averaged over many
// random directions.
inline double quantile(const std::vector<double>& sorted, double t) {
  const double pos = t * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

struct McResult {
  double mean;
  double se;
};

inline McResult sw_monte_carlo(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q, int power, int directions,
                   std::uint64_t seed) {
  Rng rng(seed);
  const auto n = static_cast<std::size_t>(std::max(p.rows(), q.rows()));
  std::vector<double> vals;
  for (int l = 0; l < directions; ++l) {
    Eigen::VectorXd theta(p.cols());
    for (Eigen::Index k = 0; k < theta.size(); ++k) theta(k) = rng.normal();
    theta.normalize();
    std::vector<double> a(static_cast<std::size_t>(p.rows()));
    std::vector<double> b(static_cast<std::size_t>(q.rows()));
    for (Eigen::Index i = 0; i < p.rows(); ++i) a[i] = p.row(i).dot(theta);
    for (Eigen::Index i = 0; i < q.rows(); ++i) b[i] = q.row(i).dot(theta);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double t = n == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(n - 1);
      const double qa = a.size() == 1 ? a[0] : quantile(a, t);
      const double qb = b.size() == 1 ? b[0] : quantile(b, t);
      s += std::pow(std::abs(qa - qb), power);
    }
    vals.push_back(s / static_cast<double>(n));
  }
  double mean = 0.0;
  for (double v : vals) mean += v;
  mean /= static_cast<double>(vals.size());
  double var = 0.0;
  for (double v : vals) var += (v - mean) * (v - mean);
  var /= static_cast<double>(vals.size() - 1);
  return {mean, std::sqrt(var / static_cast<double>(vals.size()))};
}

}  // namespace mdke::oracle
