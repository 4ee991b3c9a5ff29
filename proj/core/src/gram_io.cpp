#include "mdke/gram_io.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

#include "mdke/dataset.hpp"
#include "mdke/file_util.hpp"

namespace mdke {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& cell, std::size_t line) {
  double v = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  while (begin < end && *begin == ' ') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end)
    throw DataError("gram csv line " + std::to_string(line) + ": bad number '" + cell + "'");
  return v;
}

}  // namespace

std::string to_csv(const GramMatrix& gram) {
  std::string out;
  for (std::size_t i = 0; i < gram.ids.size(); ++i) {
    if (i) out += ',';
    out += gram.ids[i];
  }
  out += '\n';
  for (Eigen::Index i = 0; i < gram.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < gram.values.cols(); ++j) {
      if (j) out += ',';
      out += format_double(gram.values(i, j));
    }
    out += '\n';
  }
  return out;
}

GramMatrix parse_gram_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DataError("gram csv is empty");
  GramMatrix gram;
  gram.ids = split_csv(line);
  const auto m = static_cast<Eigen::Index>(gram.ids.size());
  if (m == 0) throw DataError("gram csv has no ids");
  gram.values.resize(m, m);
  Eigen::Index row = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    if (row >= m) throw DataError("gram csv has more rows than ids");
    const auto cells = split_csv(line);
    if (static_cast<Eigen::Index>(cells.size()) != m)
      throw DataError("gram csv line " + std::to_string(line_no) + ": expected " +
                      std::to_string(m) + " entries");
    for (Eigen::Index j = 0; j < m; ++j)
      gram.values(row, j) = parse_number(cells[static_cast<std::size_t>(j)], line_no);
    ++row;
  }
  if (row != m) throw DataError("gram csv has fewer rows than ids");
  return gram;
}

void save_gram_csv(const std::filesystem::path& path, const GramMatrix& gram) {
  write_file_atomic(path, to_csv(gram));
}

GramMatrix load_gram_csv(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw DataError("gram file not found: " + path.string());
  return parse_gram_csv(read_file(path));
}

}  // namespace mdke
