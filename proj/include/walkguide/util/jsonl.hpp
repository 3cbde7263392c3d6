#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

namespace walkguide::util {

struct JsonlLine {
  int line_number = 0;  // 1-based
  nlohmann::json value;
};

// One JSON object per line; blank lines are skipped. Malformed lines throw
// Error("malformed-record") naming the line number.
std::vector<JsonlLine> read_jsonl(const std::filesystem::path& path);

void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& records);

}  // namespace walkguide::util
