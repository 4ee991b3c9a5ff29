#pragma once

#include <filesystem>
#include <string>
#include <variant>

#include "mdke/dataset.hpp"

namespace mdke {

enum class DatasetFormat { kJsonl, kHistogramJsonl };

DatasetFormat parse_dataset_format(const std::string& name);

using AnyDataset = std::variant<DistributionDataset, SupportIndexDataset>;

/// Reads one distribution per line. Blank lines are skipped; errors carry the
/// 1-based line number. Dataset order equals file order.
AnyDataset load_dataset(const std::filesystem::path& path, DatasetFormat format);

DistributionDataset load_distribution_dataset(const std::filesystem::path& path);
SupportIndexDataset load_histogram_dataset(const std::filesystem::path& path);

/// Parses from an in-memory JSONL document; `name` becomes the dataset name.
DistributionDataset parse_distribution_jsonl(const std::string& text, const std::string& name);
SupportIndexDataset parse_histogram_jsonl(const std::string& text, const std::string& name);

std::string to_jsonl(const DistributionDataset& dataset);
std::string to_jsonl(const SupportIndexDataset& dataset);

void save_dataset(const std::filesystem::path& path, const DistributionDataset& dataset);
void save_dataset(const std::filesystem::path& path, const SupportIndexDataset& dataset);

}  // namespace mdke
