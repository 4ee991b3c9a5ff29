#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mdke/errors.hpp"
#include "mdke/random.hpp"

namespace mdke {

/// One input distribution observed through N i.i.d. samples in R^d.
/// Immutable after construction.
class EmpiricalDistribution {
 public:
  EmpiricalDistribution(std::string id, Eigen::MatrixXd samples,
                        std::optional<int> label = std::nullopt);

  const std::string& id() const { return id_; }
  const Eigen::MatrixXd& samples() const { return samples_; }
  const std::optional<int>& label() const { return label_; }
  Eigen::Index size() const { return samples_.rows(); }
  Eigen::Index dim() const { return samples_.cols(); }

 private:
  std::string id_;
  Eigen::MatrixXd samples_;
  std::optional<int> label_;
};

/// Ordered collection of distributions sharing one input dimension.
class DistributionDataset {
 public:
  DistributionDataset(std::string name, std::vector<EmpiricalDistribution> distributions);

  const std::string& name() const { return name_; }
  const std::vector<EmpiricalDistribution>& distributions() const { return distributions_; }
  const EmpiricalDistribution& operator[](std::size_t i) const { return distributions_[i]; }
  std::size_t size() const { return distributions_.size(); }
  Eigen::Index input_dim() const { return input_dim_; }

  std::vector<std::string> ids() const;
  std::vector<std::optional<int>> labels() const;

 private:
  std::string name_;
  std::vector<EmpiricalDistribution> distributions_;
  Eigen::Index input_dim_ = 0;
};

/// A distribution over a finite support {0, ..., V-1}: a weighted index histogram.
struct IndexHistogram {
  std::string id;
  std::vector<std::size_t> indices;
  std::vector<double> weights;
  std::optional<int> label;
};

class SupportIndexDataset {
 public:
  SupportIndexDataset(std::string name, std::size_t support_size,
                      std::vector<IndexHistogram> distributions);

  const std::string& name() const { return name_; }
  std::size_t support_size() const { return support_size_; }
  const std::vector<IndexHistogram>& distributions() const { return distributions_; }
  const IndexHistogram& operator[](std::size_t i) const { return distributions_[i]; }
  std::size_t size() const { return distributions_.size(); }

  std::vector<std::string> ids() const;
  std::vector<std::optional<int>> labels() const;

 private:
  std::string name_;
  std::size_t support_size_;
  std::vector<IndexHistogram> distributions_;
};

/// Draws `count` rows: without replacement when count <= N, otherwise with
/// replacement. The result keeps the source id and label.
EmpiricalDistribution subsample(const EmpiricalDistribution& dist, std::size_t count, Rng& rng);

/// Draws `count` support indices i.i.d. from the histogram weights; the
/// result carries uniform weights 1/count.
IndexHistogram subsample(const IndexHistogram& hist, std::size_t count, Rng& rng);

/// `m` clusters on S^{d-1}. Centers are the +/- standard basis axes when
/// m <= 2d, otherwise uniform draws with a minimum pairwise angle. Each sample
/// is normalize(center + spread * N(0, I)); labels are the cluster index.
DistributionDataset synth_sphere_mixture(std::size_t m, std::size_t n, Eigen::Index d,
                                         double spread, std::uint64_t seed);

/// Balanced binary task of Gaussian clouds. Class 0 means are drawn around
/// +separation * e1, class 1 around -separation * e1 (unit isotropic jitter
/// on the mean, unit covariance for the samples).
DistributionDataset synth_two_class_task(std::size_t m_per_class, std::size_t n, Eigen::Index d,
                                         double separation, std::uint64_t seed);

}  // namespace mdke
