#include "mdke/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "parallel.hpp"

namespace mdke {

std::string to_string(DistributionKernel family) {
  switch (family) {
    case DistributionKernel::kLinear: return "linear";
    case DistributionKernel::kGaussian: return "gaussian";
    case DistributionKernel::kCauchy: return "cauchy";
    case DistributionKernel::kImq: return "imq";
    case DistributionKernel::kSw1: return "sw1";
    case DistributionKernel::kSw2: return "sw2";
  }
  return "unknown";
}

DistributionKernel parse_distribution_kernel(const std::string& name) {
  if (name == "linear") return DistributionKernel::kLinear;
  if (name == "gaussian") return DistributionKernel::kGaussian;
  if (name == "cauchy") return DistributionKernel::kCauchy;
  if (name == "imq") return DistributionKernel::kImq;
  if (name == "sw1") return DistributionKernel::kSw1;
  if (name == "sw2") return DistributionKernel::kSw2;
  throw std::invalid_argument("unknown distribution kernel family '" + name + "'");
}

bool is_normalized(DistributionKernel family) { return family != DistributionKernel::kLinear; }

bool is_mmd_family(DistributionKernel family) {
  return family == DistributionKernel::kLinear || family == DistributionKernel::kGaussian ||
         family == DistributionKernel::kCauchy || family == DistributionKernel::kImq;
}

WeightedPoints uniform_points(Eigen::MatrixXd points) {
  const auto n = points.rows();
  if (n < 1) throw std::invalid_argument("uniform_points: no points");
  return {std::move(points), Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n))};
}

WeightedPoints canonical_order(const WeightedPoints& p) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(p.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index j = 0; j < p.dim(); ++j) {
      if (p.points(a, j) < p.points(b, j)) return true;
      if (p.points(b, j) < p.points(a, j)) return false;
    }
    return p.weights(a) < p.weights(b);
  });
  WeightedPoints out{Eigen::MatrixXd(p.size(), p.dim()), Eigen::VectorXd(p.size())};
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(k);
    out.points.row(r) = p.points.row(order[k]);
    out.weights(r) = p.weights(order[k]);
  }
  return out;
}

double embedding_kernel(const Eigen::Ref<const Eigen::RowVectorXd>& z,
                        const Eigen::Ref<const Eigen::RowVectorXd>& z_prime, double gamma1) {
  return std::exp(-0.5 * gamma1 * (z - z_prime).squaredNorm());
}

namespace {

// Sum in the stored row order; callers pass canonically ordered inputs.
double accumulate_inner(const WeightedPoints& p, const WeightedPoints& q, double gamma1) {
  const double half_gamma = 0.5 * gamma1;
  const Eigen::Index d = p.dim();
  double total = 0.0;
  for (Eigen::Index a = 0; a < p.size(); ++a) {
    double row = 0.0;
    for (Eigen::Index b = 0; b < q.size(); ++b) {
      double sq = 0.0;
      for (Eigen::Index j = 0; j < d; ++j) {
        const double diff = p.points(a, j) - q.points(b, j);
        sq += diff * diff;
      }
      row += q.weights(b) * std::exp(-half_gamma * sq);
    }
    total += p.weights(a) * row;
  }
  return total;
}

// Strict lexicographic order on (size, points, weights) of canonical forms.
bool canonical_less(const WeightedPoints& p, const WeightedPoints& q) {
  if (p.size() != q.size()) return p.size() < q.size();
  for (Eigen::Index a = 0; a < p.size(); ++a)
    for (Eigen::Index j = 0; j < p.dim(); ++j)
      if (p.points(a, j) != q.points(a, j)) return p.points(a, j) < q.points(a, j);
  for (Eigen::Index a = 0; a < p.size(); ++a)
    if (p.weights(a) != q.weights(a)) return p.weights(a) < q.weights(a);
  return false;
}

// Bit-symmetric in its arguments: the smaller canonical form drives the outer loop.
double symmetric_inner(const WeightedPoints& cp, const WeightedPoints& cq, double gamma1) {
  return canonical_less(cq, cp) ? accumulate_inner(cq, cp, gamma1) : accumulate_inner(cp, cq, gamma1);
}

void check_compatible(const WeightedPoints& p, const WeightedPoints& q) {
  if (p.size() < 1 || q.size() < 1) throw std::invalid_argument("mean_inner: empty distribution");
  if (p.dim() != q.dim()) throw std::invalid_argument("mean_inner: dimension mismatch");
  if (p.weights.size() != p.size() || q.weights.size() != q.size())
    throw std::invalid_argument("mean_inner: weights do not match points");
}

}  // namespace

double mean_inner(const WeightedPoints& p, const WeightedPoints& q, double gamma1) {
  check_compatible(p, q);
  return symmetric_inner(canonical_order(p), canonical_order(q), gamma1);
}

double mmd_sq_from_inner(double pp, double qq, double pq) {
  return std::max(0.0, pp + qq - 2.0 * pq);
}

double mmd_sq(const WeightedPoints& p, const WeightedPoints& q, double gamma1) {
  const auto cp = canonical_order(p);
  const auto cq = canonical_order(q);
  check_compatible(cp, cq);
  return mmd_sq_from_inner(accumulate_inner(cp, cp, gamma1), accumulate_inner(cq, cq, gamma1),
                           symmetric_inner(cp, cq, gamma1));
}

double distribution_kernel_value(double d2, DistributionKernel family, double gamma2) {
  switch (family) {
    case DistributionKernel::kGaussian: return std::exp(-0.5 * gamma2 * d2);
    case DistributionKernel::kCauchy: return 1.0 / (1.0 + gamma2 * d2);
    case DistributionKernel::kImq: return 1.0 / std::sqrt(1.0 + gamma2 * d2);
    default: break;
  }
  throw std::invalid_argument("distribution_kernel_value: family '" + to_string(family) +
                              "' is not a function of squared MMD");
}

double distribution_kernel_slope(double d2, DistributionKernel family, double gamma2) {
  switch (family) {
    case DistributionKernel::kGaussian: return -0.5 * gamma2 * std::exp(-0.5 * gamma2 * d2);
    case DistributionKernel::kCauchy: {
      const double u = 1.0 + gamma2 * d2;
      return -gamma2 / (u * u);
    }
    case DistributionKernel::kImq: {
      const double u = 1.0 + gamma2 * d2;
      return -0.5 * gamma2 / (u * std::sqrt(u));
    }
    default: break;
  }
  throw std::invalid_argument("distribution_kernel_slope: family '" + to_string(family) +
                              "' is not a function of squared MMD");
}

Eigen::MatrixXd mean_embedding_gram(std::span<const WeightedPoints> encoded, double gamma1,
                                    unsigned threads) {
  const auto m = encoded.size();
  if (m == 0) throw std::invalid_argument("mean_embedding_gram: empty dataset");
  std::vector<WeightedPoints> canon;
  canon.reserve(m);
  for (const auto& p : encoded) {
    check_compatible(p, encoded.front());
    canon.push_back(canonical_order(p));
  }
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) pairs.emplace_back(i, j);
  const auto n = static_cast<Eigen::Index>(m);
  Eigen::MatrixXd g(n, n);
  detail::parallel_for(pairs.size(), threads, [&](std::size_t k) {
    const auto [i, j] = pairs[k];
    const double v = symmetric_inner(canon[i], canon[j], gamma1);
    g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    g(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
  });
  return g;
}

Eigen::MatrixXd mmd_sq_matrix(const Eigen::MatrixXd& inner) {
  const auto m = inner.rows();
  Eigen::MatrixXd d2 = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double v = mmd_sq_from_inner(inner(i, i), inner(j, j), inner(i, j));
      d2(i, j) = v;
      d2(j, i) = v;
    }
  return d2;
}

Eigen::MatrixXd distribution_kernel_matrix(const Eigen::MatrixXd& inner, DistributionKernel family,
                                           double gamma2) {
  if (inner.rows() != inner.cols())
    throw std::invalid_argument("distribution_kernel_matrix: non-square input");
  if (family == DistributionKernel::kLinear) return inner;
  if (!(gamma2 > 0.0)) throw std::invalid_argument("distribution kernel bandwidth must be > 0");
  const Eigen::MatrixXd d2 = mmd_sq_matrix(inner);
  const auto m = inner.rows();
  Eigen::MatrixXd k(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    k(i, i) = distribution_kernel_value(0.0, family, gamma2);
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double v = distribution_kernel_value(d2(i, j), family, gamma2);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

GramMatrix distribution_gram(std::span<const WeightedPoints> encoded,
                             const std::vector<std::string>& ids, DistributionKernel family,
                             double gamma1, double gamma2, unsigned threads) {
  if (!is_mmd_family(family))
    throw std::invalid_argument("distribution_gram: family '" + to_string(family) +
                                "' needs the sliced Wasserstein path");
  if (!(gamma1 > 0.0)) throw std::invalid_argument("embedding kernel bandwidth must be > 0");
  if (ids.size() != encoded.size()) throw std::invalid_argument("distribution_gram: id count mismatch");
  const Eigen::MatrixXd g = mean_embedding_gram(encoded, gamma1, threads);
  return {distribution_kernel_matrix(g, family, gamma2), GramKind::kDistributionKernel, ids};
}

}  // namespace mdke
