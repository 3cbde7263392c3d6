#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace walkguide::scene {

// The 36-entry detector vocabulary: 7 pedestrian-guidance landmark classes
// plus 29 moving/fixed obstacle classes.
const std::vector<std::string>& object_vocabulary();

bool in_vocabulary(std::string_view label);

// Lowercases and joins words with underscores; labels outside the vocabulary
// come back as "other:<canonicalized>".
std::string canonical_label(std::string_view raw);

}  // namespace walkguide::scene
