#include "mdke/gradient.hpp"

#include <cmath>
#include <stdexcept>

#include "mdke/errors.hpp"
#include "mdke/objective.hpp"

namespace mdke {

std::string to_string(Objective objective) {
  return objective == Objective::kEntropy ? "entropy" : "variance";
}

Objective parse_objective(const std::string& name) {
  if (name == "entropy") return Objective::kEntropy;
  if (name == "variance") return Objective::kVariance;
  throw std::invalid_argument("unknown objective '" + name + "'");
}

LossSettings loss_settings(const KernelConfig& config, double epsilon, Objective objective) {
  if (!config.gamma1 || !config.gamma2)
    throw std::invalid_argument("loss_settings: bandwidths must be resolved before training");
  const auto f = config.family;
  if (f != DistributionKernel::kGaussian && f != DistributionKernel::kCauchy && f != DistributionKernel::kImq)
    throw std::invalid_argument("family '" + to_string(f) + "' cannot be used for training");
  if (epsilon < 0.0) throw std::invalid_argument("epsilon must be >= 0");
  return {f, *config.gamma1, *config.gamma2, epsilon, config.jitter, objective};
}

namespace {

double block_inner(const WeightedPoints& p, const WeightedPoints& q, double half_gamma) {
  double total = 0.0;
  for (Eigen::Index a = 0; a < p.size(); ++a) {
    double row = 0.0;
    for (Eigen::Index b = 0; b < q.size(); ++b)
      row += q.weights(b) * std::exp(-half_gamma * (p.points.row(a) - q.points.row(b)).squaredNorm());
    total += p.weights(a) * row;
  }
  return total;
}

// Adds coeff * dG_pq/dZ to both gradient blocks. With p == q (same object)
// the two updates together give the factor 2 of the self inner product.
void block_backward(const WeightedPoints& p, const WeightedPoints& q, double coeff, double gamma1,
                    Eigen::MatrixXd& grad_p, Eigen::MatrixXd& grad_q) {
  const double half_gamma = 0.5 * gamma1;
  for (Eigen::Index a = 0; a < p.size(); ++a) {
    for (Eigen::Index b = 0; b < q.size(); ++b) {
      const Eigen::RowVectorXd diff = p.points.row(a) - q.points.row(b);
      const double k = std::exp(-half_gamma * diff.squaredNorm());
      // d k / d z_a = -gamma1 k (z_a - z_b)
      const double t = -gamma1 * coeff * p.weights(a) * q.weights(b) * k;
      grad_p.row(a) += t * diff;
      grad_q.row(b) -= t * diff;
    }
  }
}

}  // namespace

LatentGradient latent_loss_and_gradient(std::span<const WeightedPoints> batch,
                                        const LossSettings& settings, bool with_gradient) {
  const auto m = static_cast<Eigen::Index>(batch.size());
  if (m < 1) throw std::invalid_argument("latent_loss_and_gradient: empty batch");
  const double half_gamma = 0.5 * settings.gamma1;

  LatentGradient out;
  out.inner.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i; j < m; ++j) {
      const double v = block_inner(batch[static_cast<std::size_t>(i)], batch[static_cast<std::size_t>(j)], half_gamma);
      out.inner(i, j) = v;
      out.inner(j, i) = v;
    }

  Eigen::MatrixXd d2 = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd active = Eigen::MatrixXd::Zero(m, m);  // 1 where d2 was not clamped
  out.kernel.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    out.kernel(i, i) = distribution_kernel_value(0.0, settings.family, settings.gamma2);
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double raw = out.inner(i, i) + out.inner(j, j) - 2.0 * out.inner(i, j);
      const double v = std::max(0.0, raw);
      d2(i, j) = d2(j, i) = v;
      active(i, j) = active(j, i) = raw >= 0.0 ? 1.0 : 0.0;
      out.kernel(i, j) = out.kernel(j, i) = distribution_kernel_value(v, settings.family, settings.gamma2);
    }
  }

  const double sum_sq = out.kernel.squaredNorm();
  const double md = static_cast<double>(m);
  const bool variance = settings.objective == Objective::kVariance;
  if (variance)
    out.loss = out.inner.sum() / (md * md) - out.inner.trace() / md;
  else
    out.loss = std::log(sum_sq / (md * md));
  std::optional<LogDetFactor> logdet;
  if (settings.epsilon > 0.0) {
    logdet = factorize_logdet(out.kernel, settings.jitter);
    out.loss += settings.epsilon * logdet->value;
  }
  if (!std::isfinite(out.loss))
    throw NumericalError("non-finite loss; check the kernel bandwidths");
  if (!with_gradient) return out;

  // dL/dK per ordered entry.
  Eigen::MatrixXd grad_k = variance ? Eigen::MatrixXd::Zero(m, m) : Eigen::MatrixXd((2.0 / sum_sq) * out.kernel);
  if (logdet) {
    const Eigen::MatrixXd inv = logdet->llt.solve(Eigen::MatrixXd::Identity(m, m));
    grad_k -= (settings.epsilon / md) * 0.5 * (inv + inv.transpose());
  }

  // D_ij = dL/dK_ij * dK/dd2 on off-diagonal entries; then the coefficients of
  // dG: diagonal 2 sum_j D_ij, off-diagonal (unordered) -4 D_ij.
  Eigen::MatrixXd coeff = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j) {
      if (active(i, j) == 0.0) continue;
      const double dij = grad_k(i, j) * distribution_kernel_slope(d2(i, j), settings.family, settings.gamma2);
      coeff(i, i) += 2.0 * dij;
      coeff(j, j) += 2.0 * dij;
      coeff(i, j) = -4.0 * dij;
    }
  if (variance)
    for (Eigen::Index i = 0; i < m; ++i) {
      coeff(i, i) += 1.0 / (md * md) - 1.0 / md;
      for (Eigen::Index j = i + 1; j < m; ++j) coeff(i, j) += 2.0 / (md * md);
    }

  out.grad_points.reserve(batch.size());
  for (const auto& p : batch) out.grad_points.push_back(Eigen::MatrixXd::Zero(p.size(), p.dim()));
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i; j < m; ++j) {
      if (coeff(i, j) == 0.0) continue;
      const auto ui = static_cast<std::size_t>(i);
      const auto uj = static_cast<std::size_t>(j);
      block_backward(batch[ui], batch[uj], coeff(i, j), settings.gamma1, out.grad_points[ui],
                     out.grad_points[uj]);
    }
  for (const auto& g : out.grad_points)
    if (!g.allFinite()) throw NumericalError("non-finite gradient; check the kernel bandwidths");
  return out;
}

double batch_loss(const Encoder& encoder, std::span<const EncoderInput> batch, const LossSettings& settings) {
  const auto encoded = encode_all(encoder, batch);
  return latent_loss_and_gradient(encoded, settings, false).loss;
}

GradientBundle loss_and_gradient(const Encoder& encoder, std::span<const EncoderInput> batch,
                                 const LossSettings& settings) {
  if (batch.size() < 2) throw std::invalid_argument("loss_and_gradient: need at least 2 distributions");
  const auto encoded = encode_all(encoder, batch);
  const auto latent = latent_loss_and_gradient(encoded, settings, true);
  GradientBundle out;
  out.loss = latent.loss;
  out.shapes = parameter_shapes(encoder);
  out.gradient = Eigen::VectorXd::Zero(flat_parameters(encoder).size());
  for (std::size_t i = 0; i < batch.size(); ++i) backward(encoder, batch[i], latent.grad_points[i], out.gradient);
  if (!out.gradient.allFinite()) throw NumericalError("non-finite parameter gradient");
  return out;
}

GradientBundle finite_difference_gradient(const Encoder& encoder, std::span<const EncoderInput> batch,
                                          const LossSettings& settings, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("finite_difference_gradient: step must be > 0");
  Encoder probe = encoder;
  const Eigen::VectorXd theta = flat_parameters(encoder);
  GradientBundle out;
  out.loss = batch_loss(encoder, batch, settings);
  out.shapes = parameter_shapes(encoder);
  out.gradient.resize(theta.size());
  Eigen::VectorXd shifted = theta;
  for (Eigen::Index k = 0; k < theta.size(); ++k) {
    shifted(k) = theta(k) + step;
    set_flat_parameters(probe, shifted);
    const double up = batch_loss(probe, batch, settings);
    shifted(k) = theta(k) - step;
    set_flat_parameters(probe, shifted);
    const double down = batch_loss(probe, batch, settings);
    shifted(k) = theta(k);
    out.gradient(k) = (up - down) / (2.0 * step);
  }
  return out;
}

}  // namespace mdke
