#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mdke::cli {

struct LabelEntry {
  std::string id;
  int label = 0;
  std::optional<bool> heldout;  // from a "split" field: "test" -> true, "train" -> false
};

/// JSONL lines {"id", "label", optional "split"} or CSV rows id,label[,split]
/// (optional header starting with "id"). The format follows the extension.
std::vector<LabelEntry> load_labels(const std::filesystem::path& path);
std::vector<LabelEntry> parse_labels_jsonl(const std::string& text);
std::vector<LabelEntry> parse_labels_csv(const std::string& text);

}  // namespace mdke::cli
