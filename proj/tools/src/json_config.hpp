#pragma once

#include <CLI11.hpp>

namespace mdke::cli {

/// CLI11 config reader for a flat JSON object. Keys map to long flag names
/// with '_' read as '-'; arrays become repeated inputs.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool write_description,
                         std::string prefix) const override;
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override;
};

}  // namespace mdke::cli
