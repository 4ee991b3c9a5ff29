#include "mdke/sliced_wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "parallel.hpp"

namespace mdke {

Eigen::MatrixXd random_directions(std::size_t count, Eigen::Index dim, Rng& rng) {
  Eigen::MatrixXd dirs(static_cast<Eigen::Index>(count), dim);
  for (Eigen::Index l = 0; l < dirs.rows(); ++l) dirs.row(l) = rng.unit_vector(dim).transpose();
  return dirs;
}

std::vector<double> resample_quantiles(std::vector<double> sorted, std::size_t count) {
  const std::size_t n = sorted.size();
  if (n == 0 || count == 0) throw std::invalid_argument("resample_quantiles: empty input");
  if (n == count) return sorted;
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    if (n == 1) {
      out[k] = sorted[0];
      continue;
    }
    const double t = count == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(count - 1);
    const double pos = t * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double frac = pos - static_cast<double>(lo);
    out[k] = sorted[lo] + frac * (sorted[hi] - sorted[lo]);
  }
  return out;
}

double wasserstein_1d_pow(std::vector<double> x, std::vector<double> y, int p) {
  if (p != 1 && p != 2) throw std::invalid_argument("wasserstein_1d_pow: p must be 1 or 2");
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const std::size_t n = std::max(x.size(), y.size());
  x = resample_quantiles(std::move(x), n);
  y = resample_quantiles(std::move(y), n);
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double diff = std::abs(x[k] - y[k]);
    total += p == 1 ? diff : diff * diff;
  }
  return total / static_cast<double>(n);
}

namespace {

std::vector<double> project(const Eigen::MatrixXd& samples, const Eigen::RowVectorXd& direction) {
  const Eigen::VectorXd proj = samples * direction.transpose();
  return {proj.data(), proj.data() + proj.size()};
}

}  // namespace

SlicedWassersteinEstimate sliced_wasserstein_estimate(const Eigen::MatrixXd& p_samples,
                                                      const Eigen::MatrixXd& q_samples, int p,
                                                      const Eigen::MatrixXd& directions) {
  if (p_samples.rows() < 1 || q_samples.rows() < 1)
    throw std::invalid_argument("sliced_wasserstein: empty sample matrix");
  if (p_samples.cols() != q_samples.cols() || directions.cols() != p_samples.cols())
    throw std::invalid_argument("sliced_wasserstein: dimension mismatch");
  const auto count = directions.rows();
  if (count < 1) throw std::invalid_argument("sliced_wasserstein: need at least one direction");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (Eigen::Index l = 0; l < count; ++l) {
    const Eigen::RowVectorXd dir = directions.row(l);
    const double w = wasserstein_1d_pow(project(p_samples, dir), project(q_samples, dir), p);
    sum += w;
    sum_sq += w * w;
  }
  const double n = static_cast<double>(count);
  const double mean = sum / n;
  const double var = count > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
  return {mean, std::sqrt(var / n)};
}

double sliced_wasserstein(const Eigen::MatrixXd& p_samples, const Eigen::MatrixXd& q_samples, int p,
                          std::size_t projections, Rng& rng) {
  const auto dirs = random_directions(projections, p_samples.cols(), rng);
  return sliced_wasserstein_estimate(p_samples, q_samples, p, dirs).value;
}

GramMatrix sw_kernel_gram(const DistributionDataset& dataset, int p, double lambda,
                          std::size_t projections, Rng& rng, unsigned threads) {
  if (!(lambda > 0.0)) throw std::invalid_argument("sw_kernel_gram: lambda must be > 0");
  const auto dirs = random_directions(projections, dataset.input_dim(), rng);
  const auto m = static_cast<Eigen::Index>(dataset.size());
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j) pairs.emplace_back(i, j);
  Eigen::MatrixXd k = Eigen::MatrixXd::Identity(m, m);
  detail::parallel_for(pairs.size(), threads, [&](std::size_t idx) {
    const auto [i, j] = pairs[idx];
    const double sw = sliced_wasserstein_estimate(dataset[static_cast<std::size_t>(i)].samples(),
                                                  dataset[static_cast<std::size_t>(j)].samples(), p,
                                                  dirs)
                          .value;
    const double v = std::exp(-lambda * sw);
    k(i, j) = v;
    k(j, i) = v;
  });
  return {std::move(k), GramKind::kDistributionKernel, dataset.ids()};
}

}  // namespace mdke
