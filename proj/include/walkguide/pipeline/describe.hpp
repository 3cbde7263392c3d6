#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "walkguide/gateway/gateway.hpp"
#include "walkguide/geom/mask.hpp"
#include "walkguide/geom/path.hpp"
#include "walkguide/prompts/prompts.hpp"
#include "walkguide/scene/types.hpp"

namespace walkguide::pipeline {

enum class QueryMode { MultiTurn, SingleTurn };
enum class RecoLabel { Go, Stop, Unknown };

const char* to_string(RecoLabel label);
const char* to_string(QueryMode mode);

struct PipelineConfig {
  QueryMode mode = QueryMode::MultiTurn;
  prompts::RegionStyle region_style = prompts::RegionStyle::MaskedImage;
  bool include_detection_info = true;
  geom::PathParams path;
  std::string model_id;
  int max_tokens = 512;
  double min_region_overlap = 0.0;  // objects need overlap strictly above this
};

// Everything derived from a scene before any model call: geometry, masks, and
// the per-region object lists (k_i = objects overlapping region i).
struct ScenePlan {
  geom::PathGeometry geometry;
  geom::RegionMaskSet masks;
  std::vector<scene::DetectedObject> left_objects;
  std::vector<scene::DetectedObject> right_objects;
  std::vector<scene::DetectedObject> path_objects;
  prompts::NormPoint start{0.5, 1.0};
  prompts::NormPoint goal;
  std::vector<std::array<double, 2>> path_array;  // normalized polyline, bottom-to-top
};

ScenePlan plan_scene(const scene::SceneBundle& scene, const geom::GoalPoint& goal,
                     const PipelineConfig& config);

// The six prompts of a multi-turn run in call order (dest, left, right, path,
// desc, reco). The reco entry is rendered with placeholder descriptions since
// the real ones only exist after the first five calls.
std::vector<prompts::PromptBundle> render_multi_turn_prompts(const scene::SceneBundle& scene,
                                                             const ScenePlan& plan,
                                                             const PipelineConfig& config);

// Issues exactly six chat calls in dest, left, right, path, desc, reco order.
// left/right/path attach masked images (masked-image style) and region-filtered
// object clauses; dest/desc use the full image and the full object list; reco
// receives the five prior texts concatenated.
scene::DescriptionSet describe_scene_multi_turn(const scene::SceneBundle& scene,
                                                const geom::GoalPoint& goal,
                                                const PipelineConfig& config,
                                                gateway::ChatGateway& gateway);
scene::DescriptionSet describe_scene_multi_turn(const scene::SceneBundle& scene,
                                                const ScenePlan& plan,
                                                const PipelineConfig& config,
                                                gateway::ChatGateway& gateway);

// One chat call with the six-section prompt; the numbered answer is parsed
// into the description slots by section number.
scene::DescriptionSet describe_scene_single_turn(const scene::SceneBundle& scene,
                                                 const geom::GoalPoint& goal,
                                                 const PipelineConfig& config,
                                                 gateway::ChatGateway& gateway);

// Splits on line-initial "<n>." markers, n = 1..6; section headers echoed by
// the model are stripped. Throws "parse-failure" naming missing sections; on
// duplicated markers the first occurrence wins and a warning is recorded.
std::array<std::string, 6> parse_numbered_answer(const std::string& text,
                                                 std::vector<std::string>* warnings = nullptr);

// Case-insensitive prefix match: "follow the path" -> Go, "stop and wait" ->
// Stop, anything else Unknown.
RecoLabel parse_reco_label(std::string_view reco_text);

}  // namespace walkguide::pipeline
