#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mdke/checkpoint.hpp"
#include "mdke/dataset.hpp"
#include "mdke/encoders.hpp"
#include "mdke/gradient.hpp"
#include "mdke/kernels.hpp"
#include "mdke/objective.hpp"
#include "mdke/random.hpp"

namespace mdke {

struct TrainConfig {
  std::size_t steps = 300;
  std::size_t batch_distributions = 8;        // B
  std::size_t samples_per_distribution = 32;  // S; 0 = use every sample (exact)
  double lr = 5e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double epsilon = 0.0;  // 0 = MDKE, > 0 = MDKE-R
  Objective objective = Objective::kEntropy;
  std::uint64_t seed = 0;
  std::size_t log_every = 1;
  Eigen::Index latent_dim = 3;
  Eigen::Index hidden_dim = 64;
  bool full_report = true;  // exact full-dataset entropy report after the last step

  /// Throws std::invalid_argument when an invariant does not hold.
  void validate() const;
};

struct MetricRow {
  std::size_t step = 0;
  double loss = 0.0;
  double s2 = 0.0;
  double v_gram = 0.0;
  double avg_sq_norm = 0.0;
  double mixture_sq_norm = 0.0;
  double min_eig = 0.0;  // of K_D / B on the batch
  double max_eig = 0.0;
};

struct TrainState {
  Encoder encoder;
  Eigen::VectorXd first_moment;
  Eigen::VectorXd second_moment;
  std::size_t step = 0;  // completed optimizer steps
  Rng rng;
  std::vector<MetricRow> log;
};

TrainState make_train_state(Encoder encoder, std::uint64_t seed);

struct Bandwidths {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
};

/// Resolves "auto" bandwidths with the nearest-neighbour heuristic on the
/// latent sphere: n = B * S points for the embedding kernel, n = M for the
/// distribution kernel. `points_per_distribution` replaces S when S = 0.
Bandwidths resolve_bandwidths(const TrainConfig& config, const KernelConfig& kernel,
                              std::size_t dataset_size, std::size_t points_per_distribution);

/// Bias-corrected Adam update followed by the encoder's retraction.
void adam_step(TrainState& state, const Eigen::VectorXd& gradient, const TrainConfig& config);

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<MetricRow> log;
  std::optional<EntropyReport> full_report;
};

/// Mini-batch MDKE / MDKE-R training. Each step draws B distinct
/// distributions, subsamples S points from each, takes one Adam step. Metrics
/// are computed on the batch before the update at steps divisible by log_every.
TrainResult train(const DistributionDataset& dataset, EncoderKind kind, const TrainConfig& config,
                  const KernelConfig& kernel);
TrainResult train(const SupportIndexDataset& dataset, EncoderKind kind, const TrainConfig& config,
                  const KernelConfig& kernel);

/// Encodes a whole dataset; `samples` > 0 subsamples every distribution first.
std::vector<WeightedPoints> encode_dataset(const Encoder& encoder, const DistributionDataset& dataset,
                                           std::size_t samples, Rng& rng);
std::vector<WeightedPoints> encode_dataset(const Encoder& encoder, const SupportIndexDataset& dataset,
                                           std::size_t samples, Rng& rng);

/// CSV with columns step,loss,s2_nats,v_gram,avg_sq_norm,mixture_sq_norm,min_eig,max_eig.
std::string metrics_csv(const std::vector<MetricRow>& log);

}  // namespace mdke
