#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mdke::cli {

/// Runs the command line; returns the process exit code (0 ok, 1 invariant
/// failure, 2 usage or data error). Errors go to `err` as one JSON object.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mdke::cli
