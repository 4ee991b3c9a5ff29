#include "mdke/checkpoint.hpp"

#include "json.hpp"
#include "mdke/errors.hpp"
#include "mdke/file_util.hpp"

namespace mdke {

using nlohmann::json;

std::string to_json(const Checkpoint& c) {
  json params = json::array();
  const Eigen::VectorXd flat = flat_parameters(c.encoder);
  Eigen::Index pos = 0;
  for (const auto& shape : parameter_shapes(c.encoder)) {
    std::vector<double> values(flat.data() + pos, flat.data() + pos + shape.size());
    pos += shape.size();
    params.push_back({{"name", shape.name}, {"rows", shape.rows}, {"cols", shape.cols}, {"values", values}});
  }
  json doc = {{"kind", to_string(kind_of(c.encoder))},
              {"dims",
               {{"input_dim", c.dims.input_dim}, {"hidden_dim", c.dims.hidden_dim}, {"latent_dim", c.dims.latent_dim}}},
              {"gamma1", c.gamma1},
              {"gamma2", c.gamma2},
              {"family", to_string(c.family)},
              {"epsilon", c.epsilon},
              {"seed", c.seed},
              {"step_count", c.step_count},
              {"parameters", std::move(params)}};
  return doc.dump(2) + "\n";
}

Checkpoint parse_checkpoint(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  }
  try {
    const auto kind = parse_encoder_kind(doc.at("kind").get<std::string>());
    EncoderDims dims;
    dims.input_dim = doc.at("dims").at("input_dim").get<Eigen::Index>();
    dims.hidden_dim = doc.at("dims").at("hidden_dim").get<Eigen::Index>();
    dims.latent_dim = doc.at("dims").at("latent_dim").get<Eigen::Index>();
    Encoder encoder = init_encoder(kind, dims, 0);
    const auto shapes = parameter_shapes(encoder);
    const auto& params = doc.at("parameters");
    if (params.size() != shapes.size()) throw DataError("checkpoint parameter blocks do not match encoder kind");
    Eigen::VectorXd flat(flat_parameters(encoder).size());
    Eigen::Index pos = 0;
    for (std::size_t b = 0; b < shapes.size(); ++b) {
      const auto& block = params[b];
      if (block.at("name").get<std::string>() != shapes[b].name ||
          block.at("rows").get<Eigen::Index>() != shapes[b].rows ||
          block.at("cols").get<Eigen::Index>() != shapes[b].cols)
        throw DataError("checkpoint block '" + shapes[b].name + "' has the wrong shape");
      const auto values = block.at("values").get<std::vector<double>>();
      if (static_cast<Eigen::Index>(values.size()) != shapes[b].size())
        throw DataError("checkpoint block '" + shapes[b].name + "' has the wrong length");
      for (double v : values) flat(pos++) = v;
    }
    set_flat_parameters(encoder, flat);
    Checkpoint c{std::move(encoder), dims};
    c.gamma1 = doc.at("gamma1").get<double>();
    c.gamma2 = doc.at("gamma2").get<double>();
    c.family = parse_distribution_kernel(doc.at("family").get<std::string>());
    c.epsilon = doc.at("epsilon").get<double>();
    c.seed = doc.at("seed").get<std::uint64_t>();
    c.step_count = doc.at("step_count").get<std::uint64_t>();
    return c;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  write_file_atomic(path, to_json(checkpoint));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw DataError("checkpoint not found: " + path.string());
  return parse_checkpoint(read_file(path));
}

}  // namespace mdke
