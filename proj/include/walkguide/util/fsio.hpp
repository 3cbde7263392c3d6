#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace walkguide::util {

std::string read_file(const std::filesystem::path& path);
std::vector<uint8_t> read_file_bytes(const std::filesystem::path& path);

// Writes to a sibling temp file then renames, so readers never see partial content.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
void write_file_atomic(const std::filesystem::path& path, const std::vector<uint8_t>& bytes);

void ensure_dir(const std::filesystem::path& dir);

}  // namespace walkguide::util
