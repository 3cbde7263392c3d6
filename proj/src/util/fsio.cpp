#include "walkguide/util/fsio.hpp"

#include <fstream>

#include "walkguide/util/error.hpp"

namespace walkguide::util {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("unreadable-file", "cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return data;
}

std::vector<uint8_t> read_file_bytes(const fs::path& path) {
  std::string s = read_file(path);
  return std::vector<uint8_t>(s.begin(), s.end());
}

static void write_atomic_impl(const fs::path& path, const char* data, size_t len) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("unwritable-file", "cannot open " + tmp.string());
    out.write(data, static_cast<std::streamsize>(len));
    if (!out) throw Error("unwritable-file", "short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  write_atomic_impl(path, content.data(), content.size());
}

void write_file_atomic(const fs::path& path, const std::vector<uint8_t>& bytes) {
  write_atomic_impl(path, reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

void ensure_dir(const fs::path& dir) { fs::create_directories(dir); }

}  // namespace walkguide::util
