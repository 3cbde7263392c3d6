#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "walkguide/scene/types.hpp"

namespace walkguide::prompts {

// The six query types issued per scene.
enum class QueryKind { Dest, Left, Right, Path, Desc, Reco };

const char* to_string(QueryKind kind);

enum class RegionStyle { MaskedImage, RegionPrompt };
enum class SystemKind { General, Recommendation };

struct NormPoint {
  double x = 0;
  double y = 0;
};

// One fully rendered query: system text, user text, and which image to attach.
struct PromptBundle {
  std::string system_text;
  std::string user_text;
  bool attach_full_image = true;
  std::optional<QueryKind> attach_masked_region;  // set => attach that region's masked image
};

// Coordinates rendered with at most 4 decimals, trailing zeros trimmed but at
// least one decimal digit kept ("0.5", "1.0", "0.5079").
std::string format_coord(double v);
std::string format_point(NormPoint p);

// "The image contains objects, <label> [x1, y1, x2, y2], ..." — errors on an
// empty list; callers omit the clause instead.
std::string render_object_clause(const std::vector<scene::DetectedObject>& objects);

std::string render_system_prompt(SystemKind kind,
                                 const std::vector<scene::DetectedObject>* objects = nullptr);

// User prompt for dest/left/right/path queries. Destination queries always use
// the coordinate (region-prompt) style regardless of mode.
std::string render_region_user_prompt(QueryKind kind, RegionStyle mode, NormPoint start,
                                      NormPoint goal);

// Masked-image destination variant. Kept as a template asset; the pipeline
// never issues it because coordinates work better for destinations.
std::string render_masked_destination_prompt();

std::string render_whole_image_prompt();

// Recommendation query: the five prior descriptions joined by single spaces in
// dest, left, right, path, desc order.
std::string render_recommendation_prompt(const scene::DescriptionSet& descriptions);

// (system, user) for the six-section single-turn query.
std::pair<std::string, std::string> render_single_turn_prompt(NormPoint start, NormPoint goal);

// (system, user) for reference-guided single-answer grading.
std::pair<std::string, std::string> render_judge_prompts(const std::string& reference,
                                                         const std::string& assistant);

// Section headers of the single-turn answer format, indexed 1..6.
const char* single_turn_section_header(int section);

}  // namespace walkguide::prompts
