#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mdke/encoders.hpp"
#include "mdke/kernels.hpp"

namespace mdke {

/// kEntropy minimizes -S2; kVariance minimizes -V directly.
enum class Objective { kEntropy, kVariance };

std::string to_string(Objective objective);
Objective parse_objective(const std::string& name);

/// Loss settings for one gradient evaluation; bandwidths must be resolved.
struct LossSettings {
  DistributionKernel family = DistributionKernel::kGaussian;
  double gamma1 = 1.0;
  double gamma2 = 1.0;
  double epsilon = 0.0;  // 0 = MDKE, > 0 = MDKE-R
  double jitter = 1e-8;
  Objective objective = Objective::kEntropy;
};

/// Builds LossSettings from a KernelConfig; throws if either bandwidth is
/// still "auto" or the family cannot be trained (linear, sliced Wasserstein).
LossSettings loss_settings(const KernelConfig& config, double epsilon,
                           Objective objective = Objective::kEntropy);

/// Forward quantities and dL/dZ for a batch of encoded distributions.
struct LatentGradient {
  double loss = 0.0;
  Eigen::MatrixXd inner;   // G
  Eigen::MatrixXd kernel;  // K_D
  std::vector<Eigen::MatrixXd> grad_points;  // one per distribution, same shape as its points
};

/// Loss of the batch (mdke_r_loss of K_D) and its gradient with respect to
/// every encoded point, by reverse mode through the fixed stage chain
///   points -> kernel blocks -> G -> d2 -> K_D -> Frobenius / log-det.
LatentGradient latent_loss_and_gradient(std::span<const WeightedPoints> batch,
                                        const LossSettings& settings, bool with_gradient = true);

struct GradientBundle {
  double loss = 0.0;
  Eigen::VectorXd gradient;  // flat, in the encoder's parameter order
  std::vector<ParameterShape> shapes;
};

/// Batch loss for an encoder.
double batch_loss(const Encoder& encoder, std::span<const EncoderInput> batch,
                  const LossSettings& settings);

/// Analytic dL/dtheta. Requires at least two distributions.
GradientBundle loss_and_gradient(const Encoder& encoder, std::span<const EncoderInput> batch,
                                 const LossSettings& settings);

/// Central differences on batch_loss, one parameter coordinate at a time.
GradientBundle finite_difference_gradient(const Encoder& encoder, std::span<const EncoderInput> batch,
                                          const LossSettings& settings, double step);

}  // namespace mdke
