#include "mdke/trainer.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include "mdke/bandwidth.hpp"
#include "mdke/errors.hpp"
#include "mdke/file_util.hpp"
#include "mdke/gradient.hpp"
#include "mdke/objective.hpp"

namespace mdke {

namespace {

// Independent streams per purpose, so an explicit bandwidth does not shift the
// batch sequence.
constexpr std::uint64_t kBatchStream = 0x5EED0001ULL;
constexpr std::uint64_t kBandwidthStream = 0x5EED0002ULL;

}  // namespace

void TrainConfig::validate() const {
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  if (batch_distributions < 2) throw std::invalid_argument("batch_distributions must be >= 2");
  if (!(lr > 0.0)) throw std::invalid_argument("lr must be > 0");
  if (epsilon < 0.0) throw std::invalid_argument("epsilon must be >= 0");
  if (log_every < 1) throw std::invalid_argument("log_every must be >= 1");
  if (latent_dim < 2) throw std::invalid_argument("latent_dim must be >= 2");
  if (hidden_dim < 1) throw std::invalid_argument("hidden_dim must be >= 1");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0 && adam_beta2 >= 0.0 && adam_beta2 < 1.0))
    throw std::invalid_argument("Adam betas must lie in [0, 1)");
}

TrainState make_train_state(Encoder encoder, std::uint64_t seed) {
  const auto n = flat_parameters(encoder).size();
  return {std::move(encoder), Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), 0, Rng(seed ^ kBatchStream), {}};
}

Bandwidths resolve_bandwidths(const TrainConfig& config, const KernelConfig& kernel, std::size_t dataset_size,
                              std::size_t points_per_distribution) {
  Rng rng(config.seed ^ kBandwidthStream);
  Bandwidths out;
  if (kernel.gamma1) {
    out.gamma1 = *kernel.gamma1;
  } else {
    const std::size_t s = config.samples_per_distribution > 0 ? config.samples_per_distribution
                                                             : points_per_distribution;
    out.gamma1 = bandwidth_heuristic(std::max<std::size_t>(2, config.batch_distributions * s),
                                     config.latent_dim, rng);
  }
  if (kernel.gamma2) {
    out.gamma2 = *kernel.gamma2;
  } else {
    out.gamma2 = bandwidth_heuristic(std::max<std::size_t>(2, dataset_size), config.latent_dim, rng);
  }
  if (!(out.gamma1 > 0.0) || !(out.gamma2 > 0.0) || !std::isfinite(out.gamma1) || !std::isfinite(out.gamma2))
    throw std::invalid_argument("bandwidths must be positive and finite");
  return out;
}

void adam_step(TrainState& state, const Eigen::VectorXd& gradient, const TrainConfig& config) {
  Eigen::VectorXd theta = flat_parameters(state.encoder);
  if (gradient.size() != theta.size()) throw std::invalid_argument("adam_step: gradient shape mismatch");
  const double t = static_cast<double>(state.step + 1);
  state.first_moment = config.adam_beta1 * state.first_moment + (1.0 - config.adam_beta1) * gradient;
  state.second_moment =
      config.adam_beta2 * state.second_moment + (1.0 - config.adam_beta2) * gradient.cwiseProduct(gradient);
  const double c1 = 1.0 - std::pow(config.adam_beta1, t);
  const double c2 = 1.0 - std::pow(config.adam_beta2, t);
  for (Eigen::Index k = 0; k < theta.size(); ++k) {
    const double m_hat = state.first_moment(k) / c1;
    const double v_hat = state.second_moment(k) / c2;
    theta(k) -= config.lr * m_hat / (std::sqrt(v_hat) + config.adam_eps);
  }
  if (!theta.allFinite())
    throw NumericalError("non-finite parameters after Adam step " + std::to_string(state.step));
  set_flat_parameters(state.encoder, theta);
  retract(state.encoder);
  ++state.step;
}

namespace {

MetricRow batch_metrics(std::size_t step, const LatentGradient& latent,
                        std::span<const WeightedPoints> encoded, double gamma1) {
  MetricRow row;
  row.step = step;
  row.loss = latent.loss;
  row.s2 = renyi2_entropy(latent.kernel);
  row.v_gram = distributional_variance(latent.inner).v_gram;
  row.avg_sq_norm = latent.inner.diagonal().mean();
  row.mixture_sq_norm = pooled_mixture_sq_norm(encoded, gamma1);
  const Eigen::VectorXd eig = spectrum_report(latent.kernel);
  row.max_eig = eig(0);
  row.min_eig = eig(eig.size() - 1);
  return row;
}

using BatchDrawer = std::function<std::vector<EncoderInput>(const std::vector<std::size_t>&, Rng&)>;
using FullEncoder = std::function<std::vector<WeightedPoints>(const Encoder&)>;

TrainResult run_training(std::size_t dataset_size, std::size_t points_per_distribution, Encoder encoder,
                         const TrainConfig& config, const KernelConfig& kernel, const BatchDrawer& draw,
                         const FullEncoder& encode_full) {
  config.validate();
  if (dataset_size < config.batch_distributions)
    throw std::invalid_argument("dataset has fewer distributions (" + std::to_string(dataset_size) +
                                ") than the batch size");
  const Bandwidths bw = resolve_bandwidths(config, kernel, dataset_size, points_per_distribution);
  KernelConfig resolved = kernel;
  resolved.gamma1 = bw.gamma1;
  resolved.gamma2 = bw.gamma2;
  const LossSettings settings = loss_settings(resolved, config.epsilon, config.objective);

  TrainState state = make_train_state(std::move(encoder), config.seed);
  for (std::size_t step = 0; step < config.steps; ++step) {
    const auto picks = state.rng.sample_without_replacement(dataset_size, config.batch_distributions);
    const auto batch = draw(picks, state.rng);
    const auto encoded = encode_all(state.encoder, batch);
    LatentGradient latent;
    try {
      latent = latent_loss_and_gradient(encoded, settings, true);
    } catch (const NumericalError& e) {
      throw NumericalError("step " + std::to_string(step) + ": " + e.what());
    }
    if (step % config.log_every == 0) state.log.push_back(batch_metrics(step, latent, encoded, bw.gamma1));
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(flat_parameters(state.encoder).size());
    for (std::size_t i = 0; i < batch.size(); ++i) backward(state.encoder, batch[i], latent.grad_points[i], grad);
    try {
      adam_step(state, grad, config);
    } catch (const NumericalError& e) {
      throw NumericalError("step " + std::to_string(step) + ": " + e.what());
    }
  }

  std::optional<EntropyReport> report;
  if (config.full_report)
    report = entropy_report(encode_full(state.encoder), bw.gamma1, kernel.family, bw.gamma2);

  EncoderDims dims;
  if (const auto* t = std::get_if<TableEncoder>(&state.encoder)) {
    dims = {t->support_size(), config.hidden_dim, t->latent_dim()};
  } else {
    const auto& m = std::get<MlpEncoder>(state.encoder);
    dims = {m.input_dim(), m.hidden_dim(), m.latent_dim()};
  }
  Checkpoint ckpt{std::move(state.encoder), dims, bw.gamma1, bw.gamma2, kernel.family,
                  config.epsilon, config.seed, state.step};
  return {std::move(ckpt), std::move(state.log), std::move(report)};
}

}  // namespace

TrainResult train(const DistributionDataset& dataset, EncoderKind kind, const TrainConfig& config,
                  const KernelConfig& kernel) {
  if (kind != EncoderKind::kMlp)
    throw std::invalid_argument("sample datasets are trained with the mlp encoder; table encoders need a histogram dataset");
  config.validate();
  Encoder enc = init_encoder(kind, {dataset.input_dim(), config.hidden_dim, config.latent_dim}, config.seed);
  std::size_t max_n = 0;
  for (const auto& d : dataset.distributions()) max_n = std::max(max_n, static_cast<std::size_t>(d.size()));
  const std::size_t s = config.samples_per_distribution;
  return run_training(dataset.size(), max_n, std::move(enc), config, kernel,
                      [&](const std::vector<std::size_t>& picks, Rng& rng) {
                        std::vector<EncoderInput> batch;
                        batch.reserve(picks.size());
                        for (auto i : picks)
                          batch.push_back(make_input(s > 0 ? subsample(dataset[i], s, rng) : dataset[i]));
                        return batch;
                      },
                      [&](const Encoder& e) {
                        Rng unused(0);
                        return encode_dataset(e, dataset, 0, unused);
                      });
}

TrainResult train(const SupportIndexDataset& dataset, EncoderKind kind, const TrainConfig& config,
                  const KernelConfig& kernel) {
  if (kind != EncoderKind::kTable)
    throw std::invalid_argument("histogram datasets are trained with the table encoder");
  config.validate();
  Encoder enc = init_encoder(kind, {static_cast<Eigen::Index>(dataset.support_size()), config.hidden_dim,
                                    config.latent_dim},
                             config.seed);
  std::size_t max_n = 0;
  for (const auto& h : dataset.distributions()) max_n = std::max(max_n, h.indices.size());
  const std::size_t s = config.samples_per_distribution;
  return run_training(dataset.size(), max_n, std::move(enc), config, kernel,
                      [&](const std::vector<std::size_t>& picks, Rng& rng) {
                        std::vector<EncoderInput> batch;
                        batch.reserve(picks.size());
                        for (auto i : picks)
                          batch.push_back(make_input(s > 0 ? subsample(dataset[i], s, rng) : dataset[i]));
                        return batch;
                      },
                      [&](const Encoder& e) {
                        Rng unused(0);
                        return encode_dataset(e, dataset, 0, unused);
                      });
}

std::vector<WeightedPoints> encode_dataset(const Encoder& encoder, const DistributionDataset& dataset,
                                           std::size_t samples, Rng& rng) {
  std::vector<WeightedPoints> out;
  out.reserve(dataset.size());
  for (const auto& d : dataset.distributions())
    out.push_back(encode(encoder, make_input(samples > 0 ? subsample(d, samples, rng) : d)));
  return out;
}

std::vector<WeightedPoints> encode_dataset(const Encoder& encoder, const SupportIndexDataset& dataset,
                                           std::size_t samples, Rng& rng) {
  std::vector<WeightedPoints> out;
  out.reserve(dataset.size());
  for (const auto& h : dataset.distributions())
    out.push_back(encode(encoder, make_input(samples > 0 ? subsample(h, samples, rng) : h)));
  return out;
}

std::string metrics_csv(const std::vector<MetricRow>& log) {
  std::string out = "step,loss,s2_nats,v_gram,avg_sq_norm,mixture_sq_norm,min_eig,max_eig\n";
  for (const auto& r : log) {
    out += std::to_string(r.step);
    for (double v : {r.loss, r.s2, r.v_gram, r.avg_sq_norm, r.mixture_sq_norm, r.min_eig, r.max_eig}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

}  // namespace mdke
