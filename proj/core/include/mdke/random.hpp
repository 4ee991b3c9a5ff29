#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

namespace mdke {

/// Seeded random stream. Every stochastic routine in the library takes one of
/// these explicitly; there is no global generator.
///
/// Uniform and normal variates are derived from the raw 64-bit engine output
/// with fixed formulas so that streams are reproducible across standard
/// library implementations (std::normal_distribution is not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();

  /// Uniform integer on [0, n).
  std::size_t index(std::size_t n);

  /// Standard normal via Box-Muller; caches the second variate.
  double normal();

  /// Matrix of i.i.d. standard normal entries, filled row by row.
  Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols);

  /// Uniform point on the unit sphere S^{dim-1}.
  Eigen::VectorXd unit_vector(Eigen::Index dim);

  /// `count` distinct indices from [0, n) in random order (partial shuffle).
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t count);

  /// Derives an independent child stream; used to give sub-tasks their own seeds.
  Rng split();

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace mdke
