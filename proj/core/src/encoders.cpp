#include "mdke/encoders.hpp"

#include <cmath>
#include <stdexcept>

namespace mdke {

namespace {

constexpr double kZeroNudge = 1e-12;

template <typename... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <typename... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void copy_row_major(const Eigen::MatrixXd& m, Eigen::Ref<Eigen::VectorXd> out, Eigen::Index& pos) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(pos++) = m(i, j);
}

void read_row_major(Eigen::MatrixXd& m, const Eigen::Ref<const Eigen::VectorXd>& in, Eigen::Index& pos) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = in(pos++);
}

Eigen::Index total_size(const std::vector<ParameterShape>& shapes) {
  Eigen::Index n = 0;
  for (const auto& s : shapes) n += s.size();
  return n;
}

}  // namespace

std::string to_string(EncoderKind kind) { return kind == EncoderKind::kTable ? "table" : "mlp"; }

EncoderKind parse_encoder_kind(const std::string& name) {
  if (name == "table") return EncoderKind::kTable;
  if (name == "mlp") return EncoderKind::kMlp;
  throw std::invalid_argument("unknown encoder kind '" + name + "'");
}

EncoderInput make_input(const EmpiricalDistribution& dist) {
  const auto n = dist.size();
  return {dist.id(), dist.samples(), {}, Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n))};
}

EncoderInput make_input(const IndexHistogram& hist) {
  EncoderInput in{hist.id, {}, hist.indices, Eigen::VectorXd(static_cast<Eigen::Index>(hist.weights.size()))};
  for (std::size_t k = 0; k < hist.weights.size(); ++k) in.weights(static_cast<Eigen::Index>(k)) = hist.weights[k];
  return in;
}

Eigen::MatrixXd project_rows_to_sphere(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd out = m;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    double norm = out.row(i).norm();
    if (norm == 0.0) {
      out(i, 0) += kZeroNudge;
      norm = out.row(i).norm();
    }
    out.row(i) /= norm;
  }
  return out;
}

// ---------------------------------------------------------------------------
// TableEncoder

TableEncoder::TableEncoder(Eigen::MatrixXd embeddings) : embeddings_(std::move(embeddings)) {
  if (embeddings_.rows() < 1 || embeddings_.cols() < 1)
    throw std::invalid_argument("TableEncoder: empty embedding table");
  embeddings_ = project_rows_to_sphere(embeddings_);
}

Eigen::MatrixXd TableEncoder::encode(std::span<const std::size_t> indices) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(indices.size()), latent_dim());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= static_cast<std::size_t>(support_size()))
      throw std::out_of_range("TableEncoder: index " + std::to_string(indices[k]) +
                              " out of range for support of size " + std::to_string(support_size()));
    out.row(static_cast<Eigen::Index>(k)) = embeddings_.row(static_cast<Eigen::Index>(indices[k]));
  }
  return out;
}

void TableEncoder::backward(std::span<const std::size_t> indices, const Eigen::MatrixXd& grad_latent,
                            Eigen::Ref<Eigen::VectorXd> grad_params) const {
  const auto d = latent_dim();
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const auto base = static_cast<Eigen::Index>(indices[k]) * d;
    grad_params.segment(base, d) += grad_latent.row(static_cast<Eigen::Index>(k)).transpose();
  }
}

std::vector<ParameterShape> TableEncoder::shapes() const {
  return {{"embeddings", embeddings_.rows(), embeddings_.cols()}};
}

Eigen::VectorXd TableEncoder::parameters() const {
  Eigen::VectorXd out(embeddings_.size());
  Eigen::Index pos = 0;
  copy_row_major(embeddings_, out, pos);
  return out;
}

void TableEncoder::set_parameters(const Eigen::Ref<const Eigen::VectorXd>& flat) {
  if (flat.size() != embeddings_.size()) throw std::invalid_argument("TableEncoder: parameter size mismatch");
  Eigen::Index pos = 0;
  read_row_major(embeddings_, flat, pos);
}

void TableEncoder::retract() { embeddings_ = project_rows_to_sphere(embeddings_); }

// ---------------------------------------------------------------------------
// MlpEncoder

MlpEncoder::MlpEncoder(Eigen::MatrixXd w1, Eigen::VectorXd b1, Eigen::MatrixXd w2, Eigen::VectorXd b2)
    : w1_(std::move(w1)), b1_(std::move(b1)), w2_(std::move(w2)), b2_(std::move(b2)) {
  if (w1_.rows() < 1 || w1_.cols() < 1 || w2_.rows() < 1)
    throw std::invalid_argument("MlpEncoder: empty layer");
  if (b1_.size() != w1_.rows() || w2_.cols() != w1_.rows() || b2_.size() != w2_.rows())
    throw std::invalid_argument("MlpEncoder: inconsistent layer shapes");
}

Eigen::MatrixXd MlpEncoder::encode(const Eigen::MatrixXd& x) const {
  if (x.cols() != input_dim())
    throw std::invalid_argument("MlpEncoder: input has dim " + std::to_string(x.cols()) + ", expected " +
                                std::to_string(input_dim()));
  Eigen::MatrixXd hidden = (x * w1_.transpose()).rowwise() + b1_.transpose();
  hidden = hidden.cwiseMax(0.0);
  Eigen::MatrixXd u = (hidden * w2_.transpose()).rowwise() + b2_.transpose();
  return project_rows_to_sphere(u);
}

void MlpEncoder::backward(const Eigen::MatrixXd& x, const Eigen::MatrixXd& grad_latent,
                          Eigen::Ref<Eigen::VectorXd> grad_params) const {
  const Eigen::MatrixXd pre = (x * w1_.transpose()).rowwise() + b1_.transpose();
  const Eigen::MatrixXd hidden = pre.cwiseMax(0.0);
  Eigen::MatrixXd u = (hidden * w2_.transpose()).rowwise() + b2_.transpose();

  // Through y = u / |u|: dL/du = (I - y y^T) dL/dy / |u|.
  Eigen::MatrixXd grad_u(u.rows(), u.cols());
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    if (u.row(i).norm() == 0.0) u(i, 0) += kZeroNudge;
    const double norm = u.row(i).norm();
    const Eigen::RowVectorXd y = u.row(i) / norm;
    const Eigen::RowVectorXd gy = grad_latent.row(i);
    grad_u.row(i) = (gy - y * y.dot(gy)) / norm;
  }
  const Eigen::MatrixXd grad_w2 = grad_u.transpose() * hidden;
  const Eigen::VectorXd grad_b2 = grad_u.colwise().sum().transpose();
  Eigen::MatrixXd grad_pre = grad_u * w2_;
  grad_pre = grad_pre.cwiseProduct((pre.array() > 0.0).cast<double>().matrix());
  const Eigen::MatrixXd grad_w1 = grad_pre.transpose() * x;
  const Eigen::VectorXd grad_b1 = grad_pre.colwise().sum().transpose();

  Eigen::Index pos = 0;
  for (Eigen::Index i = 0; i < grad_w1.rows(); ++i)
    for (Eigen::Index j = 0; j < grad_w1.cols(); ++j) grad_params(pos++) += grad_w1(i, j);
  for (Eigen::Index i = 0; i < grad_b1.size(); ++i) grad_params(pos++) += grad_b1(i);
  for (Eigen::Index i = 0; i < grad_w2.rows(); ++i)
    for (Eigen::Index j = 0; j < grad_w2.cols(); ++j) grad_params(pos++) += grad_w2(i, j);
  for (Eigen::Index i = 0; i < grad_b2.size(); ++i) grad_params(pos++) += grad_b2(i);
}

std::vector<ParameterShape> MlpEncoder::shapes() const {
  return {{"w1", w1_.rows(), w1_.cols()},
          {"b1", b1_.size(), 1},
          {"w2", w2_.rows(), w2_.cols()},
          {"b2", b2_.size(), 1}};
}

Eigen::VectorXd MlpEncoder::parameters() const {
  Eigen::VectorXd out(total_size(shapes()));
  Eigen::Index pos = 0;
  copy_row_major(w1_, out, pos);
  out.segment(pos, b1_.size()) = b1_;
  pos += b1_.size();
  copy_row_major(w2_, out, pos);
  out.segment(pos, b2_.size()) = b2_;
  return out;
}

void MlpEncoder::set_parameters(const Eigen::Ref<const Eigen::VectorXd>& flat) {
  if (flat.size() != total_size(shapes())) throw std::invalid_argument("MlpEncoder: parameter size mismatch");
  Eigen::Index pos = 0;
  read_row_major(w1_, flat, pos);
  b1_ = flat.segment(pos, b1_.size());
  pos += b1_.size();
  read_row_major(w2_, flat, pos);
  b2_ = flat.segment(pos, b2_.size());
}

// ---------------------------------------------------------------------------

Encoder init_encoder(EncoderKind kind, const EncoderDims& dims, std::uint64_t seed) {
  if (dims.input_dim < 1 || dims.latent_dim < 1) throw std::invalid_argument("init_encoder: bad dims");
  Rng rng(seed);
  if (kind == EncoderKind::kTable) {
    if (dims.latent_dim < 2) throw std::invalid_argument("init_encoder: latent_dim must be >= 2");
    return TableEncoder(rng.normal_matrix(dims.input_dim, dims.latent_dim));
  }
  if (dims.hidden_dim < 1) throw std::invalid_argument("init_encoder: hidden_dim must be >= 1");
  auto glorot = [&](Eigen::Index rows, Eigen::Index cols) {
    const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Eigen::MatrixXd w(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) w(i, j) = (2.0 * rng.uniform() - 1.0) * a;
    return w;
  };
  Eigen::MatrixXd w1 = glorot(dims.hidden_dim, dims.input_dim);
  Eigen::MatrixXd w2 = glorot(dims.latent_dim, dims.hidden_dim);
  return MlpEncoder(std::move(w1), Eigen::VectorXd::Zero(dims.hidden_dim), std::move(w2),
                    Eigen::VectorXd::Zero(dims.latent_dim));
}

EncoderKind kind_of(const Encoder& encoder) {
  return std::holds_alternative<TableEncoder>(encoder) ? EncoderKind::kTable : EncoderKind::kMlp;
}

Eigen::Index latent_dim(const Encoder& encoder) {
  return std::visit([](const auto& e) { return e.latent_dim(); }, encoder);
}

std::vector<ParameterShape> parameter_shapes(const Encoder& encoder) {
  return std::visit([](const auto& e) { return e.shapes(); }, encoder);
}

Eigen::VectorXd flat_parameters(const Encoder& encoder) {
  return std::visit([](const auto& e) { return e.parameters(); }, encoder);
}

void set_flat_parameters(Encoder& encoder, const Eigen::Ref<const Eigen::VectorXd>& flat) {
  std::visit([&](auto& e) { e.set_parameters(flat); }, encoder);
}

void retract(Encoder& encoder) {
  std::visit([](auto& e) { e.retract(); }, encoder);
}

WeightedPoints encode(const Encoder& encoder, const EncoderInput& input) {
  Eigen::MatrixXd points = std::visit(
      Overloaded{[&](const TableEncoder& e) {
                   if (input.indices.empty()) throw std::invalid_argument("table encoder needs support indices");
                   return e.encode(input.indices);
                 },
                 [&](const MlpEncoder& e) {
                   if (input.samples.rows() == 0) throw std::invalid_argument("mlp encoder needs raw samples");
                   return e.encode(input.samples);
                 }},
      encoder);
  if (input.weights.size() != points.rows())
    throw std::invalid_argument("encode: weights do not match inputs for '" + input.id + "'");
  return {std::move(points), input.weights};
}

std::vector<WeightedPoints> encode_all(const Encoder& encoder, std::span<const EncoderInput> inputs) {
  std::vector<WeightedPoints> out;
  out.reserve(inputs.size());
  for (const auto& in : inputs) out.push_back(encode(encoder, in));
  return out;
}

void backward(const Encoder& encoder, const EncoderInput& input, const Eigen::MatrixXd& grad_latent,
              Eigen::Ref<Eigen::VectorXd> grad_params) {
  std::visit(Overloaded{[&](const TableEncoder& e) { e.backward(input.indices, grad_latent, grad_params); },
                        [&](const MlpEncoder& e) { e.backward(input.samples, grad_latent, grad_params); }},
             encoder);
}

}  // namespace mdke
