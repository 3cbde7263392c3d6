#include "walkguide/util/jsonl.hpp"

#include <fstream>
#include <sstream>

#include "walkguide/util/error.hpp"
#include "walkguide/util/fsio.hpp"
#include "walkguide/util/text.hpp"

namespace walkguide::util {

std::vector<JsonlLine> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("unreadable-file", "cannot open " + path.string());
  std::vector<JsonlLine> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    try {
      out.push_back({number, nlohmann::json::parse(line)});
    } catch (const nlohmann::json::exception& e) {
      throw Error("malformed-record",
                  path.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& records) {
  std::ostringstream out;
  for (const auto& r : records) out << r.dump() << "\n";
  write_file_atomic(path, out.str());
}

}  // namespace walkguide::util
