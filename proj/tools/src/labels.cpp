#include "labels.hpp"

#include <charconv>
#include <sstream>

#include <json.hpp>

#include "commands.hpp"
#include "mdke/file_util.hpp"

namespace mdke::cli {

namespace {

std::optional<bool> parse_split(const std::string& s, std::size_t line) {
  if (s.empty()) return std::nullopt;
  if (s == "test") return true;
  if (s == "train") return false;
  throw UsageError("labels line " + std::to_string(line) + ": split must be \"train\" or \"test\", got \"" + s + "\"");
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

}  // namespace

std::vector<LabelEntry> parse_labels_jsonl(const std::string& text) {
  std::vector<LabelEntry> out;
  std::istringstream in(text);
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      throw UsageError("labels line " + std::to_string(no) + ": invalid JSON");
    }
    if (!j.is_object() || !j.contains("id") || !j.contains("label") || !j["id"].is_string() ||
        !j["label"].is_number_integer())
      throw UsageError("labels line " + std::to_string(no) + ": need string \"id\" and integer \"label\"");
    LabelEntry e{j["id"].get<std::string>(), j["label"].get<int>(), std::nullopt};
    if (j.contains("split")) {
      if (!j["split"].is_string()) throw UsageError("labels line " + std::to_string(no) + ": split must be a string");
      e.heldout = parse_split(j["split"].get<std::string>(), no);
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<LabelEntry> parse_labels_csv(const std::string& text) {
  std::vector<LabelEntry> out;
  std::istringstream in(text);
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    line = trim(line);
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(trim(f));
    if (no == 1 && !fields.empty() && fields[0] == "id") continue;
    if (fields.size() < 2 || fields.size() > 3)
      throw UsageError("labels line " + std::to_string(no) + ": expected id,label[,split]");
    int label = 0;
    const auto& s = fields[1];
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), label);
    if (ec != std::errc{} || ptr != s.data() + s.size())
      throw UsageError("labels line " + std::to_string(no) + ": label must be an integer");
    out.push_back({fields[0], label, fields.size() == 3 ? parse_split(fields[2], no) : std::nullopt});
  }
  return out;
}

std::vector<LabelEntry> load_labels(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw UsageError("labels not found: " + path.string());
  const std::string text = read_file(path);
  return path.extension() == ".csv" ? parse_labels_csv(text) : parse_labels_jsonl(text);
}

}  // namespace mdke::cli
