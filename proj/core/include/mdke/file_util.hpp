#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace mdke {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

/// Writes `contents` to a temporary sibling and renames it over `path`, so
/// readers never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

}  // namespace mdke
