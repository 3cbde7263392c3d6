#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace walkguide::util {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
bool starts_with_icase(std::string_view text, std::string_view prefix);

// Whitespace-separated tokens; empty input yields an empty list.
std::vector<std::string> split_ws(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

// FNV-1a 64-bit, used for seed derivation (not for cache keys).
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 1469598103934665603ull);

}  // namespace walkguide::util
