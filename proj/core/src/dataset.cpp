#include "mdke/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_set>

namespace mdke {

EmpiricalDistribution::EmpiricalDistribution(std::string id, Eigen::MatrixXd samples,
                                             std::optional<int> label)
    : id_(std::move(id)), samples_(std::move(samples)), label_(label) {
  if (samples_.rows() < 1) throw DataError("distribution '" + id_ + "' has no samples");
  if (samples_.cols() < 1) throw DataError("distribution '" + id_ + "' has zero-width samples");
  if (!samples_.allFinite()) throw DataError("distribution '" + id_ + "' has non-finite samples");
}

DistributionDataset::DistributionDataset(std::string name,
                                         std::vector<EmpiricalDistribution> distributions)
    : name_(std::move(name)), distributions_(std::move(distributions)) {
  if (distributions_.empty()) throw DataError("dataset '" + name_ + "' is empty");
  input_dim_ = distributions_.front().dim();
  std::unordered_set<std::string> seen;
  for (const auto& d : distributions_) {
    if (d.dim() != input_dim_)
      throw DataError("dimension mismatch: distribution '" + d.id() + "' has dim " +
                      std::to_string(d.dim()) + ", expected " + std::to_string(input_dim_));
    if (!seen.insert(d.id()).second) throw DataError("duplicate id '" + d.id() + "'");
  }
}

std::vector<std::string> DistributionDataset::ids() const {
  std::vector<std::string> out;
  out.reserve(distributions_.size());
  for (const auto& d : distributions_) out.push_back(d.id());
  return out;
}

std::vector<std::optional<int>> DistributionDataset::labels() const {
  std::vector<std::optional<int>> out;
  out.reserve(distributions_.size());
  for (const auto& d : distributions_) out.push_back(d.label());
  return out;
}

SupportIndexDataset::SupportIndexDataset(std::string name, std::size_t support_size,
                                         std::vector<IndexHistogram> distributions)
    : name_(std::move(name)), support_size_(support_size), distributions_(std::move(distributions)) {
  if (distributions_.empty()) throw DataError("dataset '" + name_ + "' is empty");
  if (support_size_ == 0) throw DataError("support_size must be positive");
  std::unordered_set<std::string> seen;
  for (const auto& h : distributions_) {
    if (!seen.insert(h.id).second) throw DataError("duplicate id '" + h.id + "'");
    if (h.indices.empty()) throw DataError("histogram '" + h.id + "' is empty");
    if (h.indices.size() != h.weights.size())
      throw DataError("histogram '" + h.id + "': indices and weights differ in length");
    double total = 0.0;
    for (std::size_t k = 0; k < h.indices.size(); ++k) {
      if (h.indices[k] >= support_size_)
        throw DataError("histogram '" + h.id + "': index " + std::to_string(h.indices[k]) +
                        " outside support of size " + std::to_string(support_size_));
      if (!(h.weights[k] >= 0.0) || !std::isfinite(h.weights[k]))
        throw DataError("histogram '" + h.id + "': negative or non-finite weight");
      total += h.weights[k];
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw DataError("histogram '" + h.id + "': weights sum to " + std::to_string(total) +
                      ", expected 1 (normalization error)");
  }
}

std::vector<std::string> SupportIndexDataset::ids() const {
  std::vector<std::string> out;
  for (const auto& h : distributions_) out.push_back(h.id);
  return out;
}

std::vector<std::optional<int>> SupportIndexDataset::labels() const {
  std::vector<std::optional<int>> out;
  for (const auto& h : distributions_) out.push_back(h.label);
  return out;
}

EmpiricalDistribution subsample(const EmpiricalDistribution& dist, std::size_t count, Rng& rng) {
  if (count < 1) throw std::invalid_argument("subsample: count must be >= 1");
  const auto n = static_cast<std::size_t>(dist.size());
  Eigen::MatrixXd out(static_cast<Eigen::Index>(count), dist.dim());
  if (count <= n) {
    const auto rows = rng.sample_without_replacement(n, count);
    for (std::size_t i = 0; i < count; ++i)
      out.row(static_cast<Eigen::Index>(i)) = dist.samples().row(static_cast<Eigen::Index>(rows[i]));
  } else {
    for (std::size_t i = 0; i < count; ++i)
      out.row(static_cast<Eigen::Index>(i)) =
          dist.samples().row(static_cast<Eigen::Index>(rng.index(n)));
  }
  return EmpiricalDistribution(dist.id(), std::move(out), dist.label());
}

IndexHistogram subsample(const IndexHistogram& hist, std::size_t count, Rng& rng) {
  if (count < 1) throw std::invalid_argument("subsample: count must be >= 1");
  std::vector<double> cumulative(hist.weights.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < hist.weights.size(); ++k) cumulative[k] = (acc += hist.weights[k]);
  IndexHistogram out{hist.id, {}, {}, hist.label};
  out.indices.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    out.indices.push_back(hist.indices[static_cast<std::size_t>(it - cumulative.begin())]);
  }
  out.weights.assign(count, 1.0 / static_cast<double>(count));
  return out;
}

namespace {

std::vector<Eigen::VectorXd> sphere_centers(std::size_t m, Eigen::Index d, Rng& rng) {
  std::vector<Eigen::VectorXd> centers;
  if (m <= static_cast<std::size_t>(2 * d)) {
    // +e0, -e0, +e1, -e1, ...
    for (std::size_t k = 0; k < m; ++k) {
      Eigen::VectorXd c = Eigen::VectorXd::Zero(d);
      c(static_cast<Eigen::Index>(k / 2)) = (k % 2 == 0) ? 1.0 : -1.0;
      centers.push_back(std::move(c));
    }
    return centers;
  }
  // Minimum angle shrinks until the rejection sampler can place every center.
  double min_cos = std::cos(std::numbers::pi / 4.0);
  while (centers.size() < m) {
    bool placed = false;
    for (int attempt = 0; attempt < 10000 && !placed; ++attempt) {
      Eigen::VectorXd c = rng.unit_vector(d);
      bool ok = true;
      for (const auto& other : centers)
        if (c.dot(other) > min_cos) {
          ok = false;
          break;
        }
      if (ok) {
        centers.push_back(std::move(c));
        placed = true;
      }
    }
    if (!placed) min_cos = 0.5 * (min_cos + 1.0);
  }
  return centers;
}

}  // namespace

DistributionDataset synth_sphere_mixture(std::size_t m, std::size_t n, Eigen::Index d,
                                         double spread, std::uint64_t seed) {
  if (m < 2) throw std::invalid_argument("synth_sphere_mixture: m must be >= 2");
  if (d < 2) throw std::invalid_argument("synth_sphere_mixture: d must be >= 2");
  if (!(spread > 0.0)) throw std::invalid_argument("synth_sphere_mixture: spread must be > 0");
  if (n < 1) throw std::invalid_argument("synth_sphere_mixture: n must be >= 1");
  Rng rng(seed);
  const auto centers = sphere_centers(m, d, rng);
  std::vector<EmpiricalDistribution> out;
  out.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    Eigen::MatrixXd samples(static_cast<Eigen::Index>(n), d);
    for (Eigen::Index i = 0; i < samples.rows(); ++i) {
      Eigen::VectorXd p = centers[k];
      for (Eigen::Index j = 0; j < d; ++j) p(j) += spread * rng.normal();
      double norm = p.norm();
      if (norm < 1e-300) {
        p = centers[k];
        norm = 1.0;
      }
      samples.row(i) = (p / norm).transpose();
    }
    out.emplace_back("d" + std::to_string(k), std::move(samples), static_cast<int>(k));
  }
  return DistributionDataset("sphere_mixture", std::move(out));
}

DistributionDataset synth_two_class_task(std::size_t m_per_class, std::size_t n, Eigen::Index d,
                                         double separation, std::uint64_t seed) {
  if (m_per_class < 2) throw std::invalid_argument("synth_two_class_task: m_per_class must be >= 2");
  if (d < 1 || n < 1) throw std::invalid_argument("synth_two_class_task: bad dimensions");
  Rng rng(seed);
  std::vector<EmpiricalDistribution> out;
  out.reserve(2 * m_per_class);
  // Interleaved classes so that any prefix of the dataset stays near-balanced.
  for (std::size_t k = 0; k < 2 * m_per_class; ++k) {
    const int label = static_cast<int>(k % 2);
    Eigen::VectorXd mean(d);
    for (Eigen::Index j = 0; j < d; ++j) mean(j) = rng.normal();
    mean(0) += (label == 0 ? separation : -separation);
    Eigen::MatrixXd samples = rng.normal_matrix(static_cast<Eigen::Index>(n), d);
    samples.rowwise() += mean.transpose();
    out.emplace_back("c" + std::to_string(label) + "_" + std::to_string(k / 2), std::move(samples),
                     label);
  }
  return DistributionDataset("two_class", std::move(out));
}

}  // namespace mdke
