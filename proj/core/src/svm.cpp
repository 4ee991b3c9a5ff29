#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "mdke/downstream.hpp"

namespace mdke {

namespace {

constexpr double kTau = 1e-12;

}  // namespace

Eigen::MatrixXd shift_to_psd(const Eigen::MatrixXd& gram, double* shift) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  double added = 0.0;
  Eigen::MatrixXd out = gram;
  if (min_eig < 0.0) {
    added = -min_eig;
    out.diagonal().array() += added;
  }
  if (shift) *shift = added;
  return out;
}

BinarySvmResult smo_solve(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y, double c,
                          const SmoOptions& options) {
  const Eigen::Index n = gram.rows();
  if (gram.cols() != n || y.size() != n) throw std::invalid_argument("smo_solve: shape mismatch");
  if (!(c > 0.0)) throw std::invalid_argument("smo_solve: C must be > 0");
  for (Eigen::Index i = 0; i < n; ++i)
    if (y(i) != 1.0 && y(i) != -1.0) throw std::invalid_argument("smo_solve: labels must be +1 or -1");

  BinarySvmResult res;
  res.alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd& a = res.alpha;
  // Gradient of 0.5 a'Qa - e'a with Q_ij = y_i y_j K_ij.
  Eigen::VectorXd g = Eigen::VectorXd::Constant(n, -1.0);

  auto in_up = [&](Eigen::Index t) { return (y(t) > 0 && a(t) < c) || (y(t) < 0 && a(t) > 0); };
  auto in_low = [&](Eigen::Index t) { return (y(t) > 0 && a(t) > 0) || (y(t) < 0 && a(t) < c); };

  for (;;) {
    Eigen::Index i = -1;
    Eigen::Index j = -1;
    double g_max = -std::numeric_limits<double>::infinity();
    double g_min = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      const double v = -y(t) * g(t);
      if (in_up(t) && v > g_max) {
        g_max = v;
        i = t;
      }
      if (in_low(t) && v < g_min) {
        g_min = v;
        j = t;
      }
    }
    res.kkt_gap = (i < 0 || j < 0) ? 0.0 : g_max - g_min;
    if (i < 0 || j < 0 || res.kkt_gap < options.tolerance) {
      res.converged = true;
      break;
    }
    if (res.iterations >= options.max_iterations) break;
    ++res.iterations;

    const double old_ai = a(i);
    const double old_aj = a(j);
    double quad = gram(i, i) + gram(j, j) - 2.0 * gram(i, j);
    if (quad <= 0.0) quad = kTau;
    if (y(i) != y(j)) {
      const double delta = (-g(i) - g(j)) / quad;
      const double diff = a(i) - a(j);
      a(i) += delta;
      a(j) += delta;
      if (diff > 0) {
        if (a(j) < 0) {
          a(j) = 0;
          a(i) = diff;
        }
      } else if (a(i) < 0) {
        a(i) = 0;
        a(j) = -diff;
      }
      if (diff > 0) {
        if (a(i) > c) {
          a(i) = c;
          a(j) = c - diff;
        }
      } else if (a(j) > c) {
        a(j) = c;
        a(i) = c + diff;
      }
    } else {
      const double delta = (g(i) - g(j)) / quad;
      const double sum = a(i) + a(j);
      a(i) -= delta;
      a(j) += delta;
      if (sum > c) {
        if (a(i) > c) {
          a(i) = c;
          a(j) = sum - c;
        }
      } else if (a(j) < 0) {
        a(j) = 0;
        a(i) = sum;
      }
      if (sum > c) {
        if (a(j) > c) {
          a(j) = c;
          a(i) = sum - c;
        }
      } else if (a(i) < 0) {
        a(i) = 0;
        a(j) = sum;
      }
    }
    const double dai = a(i) - old_ai;
    const double daj = a(j) - old_aj;
    for (Eigen::Index t = 0; t < n; ++t)
      g(t) += y(t) * (y(i) * gram(t, i) * dai + y(j) * gram(t, j) * daj);
  }

  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double yg = y(t) * g(t);
    if (a(t) >= c) {
      if (y(t) < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (a(t) <= 0) {
      if (y(t) > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  double rho = 0.0;
  if (n_free > 0) rho = sum_free / static_cast<double>(n_free);
  else if (std::isfinite(ub) && std::isfinite(lb)) rho = (ub + lb) / 2.0;
  else if (std::isfinite(ub)) rho = ub;
  else if (std::isfinite(lb)) rho = lb;
  res.bias = -rho;
  return res;
}

}  // namespace mdke
