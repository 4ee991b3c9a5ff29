#include "mdke/dataset_io.hpp"

#include <sstream>

#include "json.hpp"
#include "mdke/file_util.hpp"

namespace mdke {

using nlohmann::json;

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw DataError("line " + std::to_string(line) + ": " + what);
}

std::optional<int> parse_label(const json& record, std::size_t line) {
  if (!record.contains("label") || record["label"].is_null()) return std::nullopt;
  const auto& l = record["label"];
  if (!l.is_number_integer()) fail(line, "label must be an integer or null");
  return l.get<int>();
}

std::string parse_id(const json& record, std::size_t line) {
  if (!record.contains("id") || !record["id"].is_string()) fail(line, "missing string field 'id'");
  return record["id"].get<std::string>();
}

template <typename Fn>
void for_each_record(const std::string& text, Fn&& fn) {
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(raw);
    } catch (const json::parse_error& e) {
      fail(line, std::string("malformed JSON: ") + e.what());
    }
    if (!record.is_object()) fail(line, "record must be a JSON object");
    fn(record, line);
  }
}

json label_json(const std::optional<int>& label) {
  return label ? json(*label) : json(nullptr);
}

}  // namespace

DatasetFormat parse_dataset_format(const std::string& name) {
  if (name == "jsonl") return DatasetFormat::kJsonl;
  if (name == "histogram-jsonl") return DatasetFormat::kHistogramJsonl;
  throw DataError("unknown dataset format '" + name + "'");
}

DistributionDataset parse_distribution_jsonl(const std::string& text, const std::string& name) {
  std::vector<EmpiricalDistribution> out;
  Eigen::Index width = -1;
  for_each_record(text, [&](const json& record, std::size_t line) {
    auto id = parse_id(record, line);
    auto label = parse_label(record, line);
    if (!record.contains("samples") || !record["samples"].is_array())
      fail(line, "missing array field 'samples'");
    const auto& rows = record["samples"];
    if (rows.empty()) fail(line, "'samples' is empty");
    if (!rows[0].is_array()) fail(line, "'samples' must be an array of arrays");
    const auto d = static_cast<Eigen::Index>(rows[0].size());
    Eigen::MatrixXd samples(static_cast<Eigen::Index>(rows.size()), d);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& row = rows[i];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d)
        fail(line, "dimension mismatch: sample rows of mixed widths in '" + id + "'");
      for (std::size_t j = 0; j < row.size(); ++j) {
        if (!row[j].is_number()) fail(line, "non-numeric sample value in '" + id + "'");
        samples(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j].get<double>();
      }
    }
    if (width >= 0 && d != width)
      fail(line, "dimension mismatch: '" + id + "' has dim " + std::to_string(d) + ", expected " +
                     std::to_string(width));
    width = d;
    try {
      out.emplace_back(std::move(id), std::move(samples), label);
    } catch (const DataError& e) {
      fail(line, e.what());
    }
  });
  if (out.empty()) throw DataError("dataset '" + name + "' contains no records");
  return DistributionDataset(name, std::move(out));
}

SupportIndexDataset parse_histogram_jsonl(const std::string& text, const std::string& name) {
  std::vector<IndexHistogram> out;
  std::optional<std::size_t> support;
  for_each_record(text, [&](const json& record, std::size_t line) {
    IndexHistogram h;
    h.id = parse_id(record, line);
    h.label = parse_label(record, line);
    if (!record.contains("support_size") || !record["support_size"].is_number_integer())
      fail(line, "missing integer field 'support_size'");
    const auto v = record["support_size"].get<long long>();
    if (v <= 0) fail(line, "support_size must be positive");
    if (support && *support != static_cast<std::size_t>(v))
      fail(line, "support_size differs from earlier records");
    support = static_cast<std::size_t>(v);
    if (!record.contains("indices") || !record["indices"].is_array())
      fail(line, "missing array field 'indices'");
    if (!record.contains("weights") || !record["weights"].is_array())
      fail(line, "missing array field 'weights'");
    for (const auto& idx : record["indices"]) {
      if (!idx.is_number_integer() || idx.get<long long>() < 0)
        fail(line, "indices must be non-negative integers");
      h.indices.push_back(idx.get<std::size_t>());
    }
    for (const auto& w : record["weights"]) {
      if (!w.is_number()) fail(line, "weights must be numbers");
      h.weights.push_back(w.get<double>());
    }
    double total = 0.0;
    for (double w : h.weights) total += w;
    if (std::abs(total - 1.0) > 1e-9)
      fail(line, "normalization error: weights of '" + h.id + "' sum to " + format_double(total));
    out.push_back(std::move(h));
  });
  if (out.empty()) throw DataError("dataset '" + name + "' contains no records");
  return SupportIndexDataset(name, *support, std::move(out));
}

DistributionDataset load_distribution_dataset(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw DataError("dataset not found: " + path.string());
  return parse_distribution_jsonl(read_file(path), path.stem().string());
}

SupportIndexDataset load_histogram_dataset(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw DataError("dataset not found: " + path.string());
  return parse_histogram_jsonl(read_file(path), path.stem().string());
}

AnyDataset load_dataset(const std::filesystem::path& path, DatasetFormat format) {
  if (format == DatasetFormat::kJsonl) return load_distribution_dataset(path);
  return load_histogram_dataset(path);
}

std::string to_jsonl(const DistributionDataset& dataset) {
  std::string out;
  for (const auto& d : dataset.distributions()) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < d.dim(); ++j) row.push_back(d.samples()(i, j));
      rows.push_back(std::move(row));
    }
    json record = {{"id", d.id()}, {"label", label_json(d.label())}, {"samples", std::move(rows)}};
    out += record.dump();
    out += '\n';
  }
  return out;
}

std::string to_jsonl(const SupportIndexDataset& dataset) {
  std::string out;
  for (const auto& h : dataset.distributions()) {
    json record = {{"id", h.id},
                   {"label", label_json(h.label)},
                   {"support_size", dataset.support_size()},
                   {"indices", h.indices},
                   {"weights", h.weights}};
    out += record.dump();
    out += '\n';
  }
  return out;
}

void save_dataset(const std::filesystem::path& path, const DistributionDataset& dataset) {
  write_file_atomic(path, to_jsonl(dataset));
}

void save_dataset(const std::filesystem::path& path, const SupportIndexDataset& dataset) {
  write_file_atomic(path, to_jsonl(dataset));
}

}  // namespace mdke
