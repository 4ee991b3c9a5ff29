#pragma once

#include <filesystem>
#include <string>

#include "mdke/kernels.hpp"

namespace mdke {

/// Header row of ids, then one row of full-precision entries per id.
std::string to_csv(const GramMatrix& gram);
GramMatrix parse_gram_csv(const std::string& text);

void save_gram_csv(const std::filesystem::path& path, const GramMatrix& gram);
GramMatrix load_gram_csv(const std::filesystem::path& path);

}  // namespace mdke
