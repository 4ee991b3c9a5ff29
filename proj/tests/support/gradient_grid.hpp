#pragma once

// The small-configuration grid for analytic vs finite-difference gradients.

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mdke/encoders.hpp"
#include "mdke/gradient.hpp"
#include "mdke/random.hpp"

namespace mdke::oracle {

struct GradientCase {
  std::string name;
  Encoder encoder;
  std::vector<EncoderInput> batch;
  LossSettings settings;
};

// Worst per-coordinate |a - f| / max(|f|, 1e-3 * max|f|).
inline double fd_relative_error(const Eigen::VectorXd& analytic, const Eigen::VectorXd& fd) {
  const double scale = fd.cwiseAbs().maxCoeff();
  if (scale == 0.0) return (analytic - fd).cwiseAbs().maxCoeff();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < fd.size(); ++i)
    worst = std::max(worst, std::abs(analytic(i) - fd(i)) / std::max(std::abs(fd(i)), 1e-3 * scale));
  return worst;
}

inline EncoderInput uniform_input(std::string id, Eigen::MatrixXd samples) {
  EncoderInput in;
  in.id = std::move(id);
  in.weights = Eigen::VectorXd::Constant(samples.rows(), 1.0 / static_cast<double>(samples.rows()));
  in.samples = std::move(samples);
  return in;
}

inline EncoderInput uniform_input(std::string id, std::vector<std::size_t> indices) {
  EncoderInput in;
  in.id = std::move(id);
  in.weights = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(indices.size()),
                                         1.0 / static_cast<double>(indices.size()));
  in.indices = std::move(indices);
  return in;
}

inline double relu_margin(const GradientCase& c) {
  const auto* m = std::get_if<MlpEncoder>(&c.encoder);
  if (m == nullptr) return std::numeric_limits<double>::infinity();
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& in : c.batch)
    margin = std::min(margin, ((in.samples * m->w1().transpose()).rowwise() + m->b1().transpose()).cwiseAbs().minCoeff());
  return margin;
}

inline std::vector<GradientCase> gradient_grid(std::uint64_t seed) {
  struct Shape {
    EncoderKind kind;
    Eigen::Index in, hidden, latent;
  };
  const std::vector<Shape> shapes{{EncoderKind::kTable, 6, 0, 3},
                                  {EncoderKind::kTable, 10, 0, 4},
                                  {EncoderKind::kMlp, 3, 5, 3},
                                  {EncoderKind::kMlp, 2, 4, 2}};
  const std::vector<DistributionKernel> families{DistributionKernel::kGaussian, DistributionKernel::kCauchy,
                                                 DistributionKernel::kImq};
  Rng rng(seed);
  std::vector<GradientCase> cases;
  for (const auto& sh : shapes)
    for (std::size_t b : {2u, 3u})
      for (std::size_t s : {2u, 4u})
        for (auto family : families)
          for (double eps : {0.0, 0.1}) {
            GradientCase c{"", init_encoder(sh.kind, {sh.in, sh.hidden, sh.latent}, rng.next_u64()), {}, {}};
            // Redraw MLP cases until every hidden pre-activation is at least 1e-3
            // away from the ReLU kink, where central differences are meaningless.
            do {
              c.batch.clear();
              if (sh.kind == EncoderKind::kMlp) {
                Eigen::VectorXd theta = 0.7 * rng.normal_matrix(flat_parameters(c.encoder).size(), 1);
                set_flat_parameters(c.encoder, theta);
              }
              for (std::size_t i = 0; i < b; ++i) {
                const std::string id = "p" + std::to_string(i);
                if (sh.kind == EncoderKind::kTable) {
                  std::vector<std::size_t> idx(s);
                  for (auto& v : idx) v = rng.index(static_cast<std::size_t>(sh.in));
                  c.batch.push_back(uniform_input(id, idx));
                } else {
                  c.batch.push_back(uniform_input(id, rng.normal_matrix(static_cast<Eigen::Index>(s), sh.in)));
                }
              }
            } while (relu_margin(c) < 1e-3);
            c.settings.family = family;
            c.settings.gamma1 = 2.0;
            c.settings.gamma2 = 1.5;
            c.settings.epsilon = eps;
            c.name = to_string(sh.kind) + " in=" + std::to_string(sh.in) + " h=" + std::to_string(sh.hidden) +
                     " d=" + std::to_string(sh.latent) + " B=" + std::to_string(b) + " S=" + std::to_string(s) +
                     " " + to_string(family) + " eps=" + (eps > 0.0 ? "0.1" : "0");
            cases.push_back(std::move(c));
          }
  return cases;
}

}  // namespace mdke::oracle
