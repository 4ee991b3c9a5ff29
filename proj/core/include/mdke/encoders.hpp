#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "mdke/dataset.hpp"
#include "mdke/kernels.hpp"

namespace mdke {

enum class EncoderKind { kTable, kMlp };

std::string to_string(EncoderKind kind);
EncoderKind parse_encoder_kind(const std::string& name);

struct ParameterShape {
  std::string name;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;

  Eigen::Index size() const { return rows * cols; }
};

/// One distribution as seen by an encoder: raw sample rows for the MLP,
/// support indices for the table. `weights` holds one probability weight per
/// row (or index) and sums to one.
struct EncoderInput {
  std::string id;
  Eigen::MatrixXd samples;
  std::vector<std::size_t> indices;
  Eigen::VectorXd weights;
};

EncoderInput make_input(const EmpiricalDistribution& dist);
EncoderInput make_input(const IndexHistogram& hist);

/// Divides every row by its norm. Zero rows are nudged by 1e-12 along e1 first.
Eigen::MatrixXd project_rows_to_sphere(const Eigen::MatrixXd& m);

/// Lookup table from support indices to points on S^{d-1}.
class TableEncoder {
 public:
  /// Rows are projected onto the sphere on construction.
  explicit TableEncoder(Eigen::MatrixXd embeddings);

  const Eigen::MatrixXd& embeddings() const { return embeddings_; }
  Eigen::Index support_size() const { return embeddings_.rows(); }
  Eigen::Index latent_dim() const { return embeddings_.cols(); }

  Eigen::MatrixXd encode(std::span<const std::size_t> indices) const;
  void backward(std::span<const std::size_t> indices, const Eigen::MatrixXd& grad_latent,
                Eigen::Ref<Eigen::VectorXd> grad_params) const;

  std::vector<ParameterShape> shapes() const;
  Eigen::VectorXd parameters() const;
  /// Sets raw parameters without projection (used by finite differences).
  void set_parameters(const Eigen::Ref<const Eigen::VectorXd>& flat);
  /// Projects every row back onto the sphere after an optimizer step.
  void retract();

 private:
  Eigen::MatrixXd embeddings_;
};

/// normalize(W2 relu(W1 x + b1) + b2). Parameters are unconstrained because
/// the normalization is part of the forward map.
class MlpEncoder {
 public:
  MlpEncoder(Eigen::MatrixXd w1, Eigen::VectorXd b1, Eigen::MatrixXd w2, Eigen::VectorXd b2);

  Eigen::Index input_dim() const { return w1_.cols(); }
  Eigen::Index hidden_dim() const { return w1_.rows(); }
  Eigen::Index latent_dim() const { return w2_.rows(); }

  const Eigen::MatrixXd& w1() const { return w1_; }
  const Eigen::VectorXd& b1() const { return b1_; }
  const Eigen::MatrixXd& w2() const { return w2_; }
  const Eigen::VectorXd& b2() const { return b2_; }

  Eigen::MatrixXd encode(const Eigen::MatrixXd& x) const;
  void backward(const Eigen::MatrixXd& x, const Eigen::MatrixXd& grad_latent,
                Eigen::Ref<Eigen::VectorXd> grad_params) const;

  std::vector<ParameterShape> shapes() const;
  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::Ref<const Eigen::VectorXd>& flat);
  void retract() {}

 private:
  Eigen::MatrixXd w1_;
  Eigen::VectorXd b1_;
  Eigen::MatrixXd w2_;
  Eigen::VectorXd b2_;
};

using Encoder = std::variant<TableEncoder, MlpEncoder>;

struct EncoderDims {
  Eigen::Index input_dim = 0;  // raw input dimension (MLP) or support size (table)
  Eigen::Index hidden_dim = 64;
  Eigen::Index latent_dim = 0;
};

/// Table rows: normalized standard normals. MLP: weights uniform on
/// [-a, a] with a = sqrt(6 / (fan_in + fan_out)), zero biases.
Encoder init_encoder(EncoderKind kind, const EncoderDims& dims, std::uint64_t seed);

EncoderKind kind_of(const Encoder& encoder);
Eigen::Index latent_dim(const Encoder& encoder);
std::vector<ParameterShape> parameter_shapes(const Encoder& encoder);
Eigen::VectorXd flat_parameters(const Encoder& encoder);
void set_flat_parameters(Encoder& encoder, const Eigen::Ref<const Eigen::VectorXd>& flat);
void retract(Encoder& encoder);

/// Encoded points with the input's weights; rows are unit-norm.
WeightedPoints encode(const Encoder& encoder, const EncoderInput& input);
std::vector<WeightedPoints> encode_all(const Encoder& encoder, std::span<const EncoderInput> inputs);

/// Accumulates dL/dtheta into `grad_params` given dL/dZ for one input.
void backward(const Encoder& encoder, const EncoderInput& input, const Eigen::MatrixXd& grad_latent,
              Eigen::Ref<Eigen::VectorXd> grad_params);

}  // namespace mdke
