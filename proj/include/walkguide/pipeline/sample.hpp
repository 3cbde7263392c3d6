#pragma once

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "walkguide/scene/types.hpp"

namespace walkguide::pipeline {

// Training-sample query: image placeholder token plus the goal coordinates.
std::string render_sample_query(const geom::GoalPoint& goal);

// Training-sample answer: plain-text tagged sections in dest, left, right,
// path, reco order followed by the path array of normalized points.
std::string render_sample_answer(const scene::DescriptionSet& descriptions,
                                 const std::vector<std::array<double, 2>>& path_array);

scene::GeneratedSample emit_training_sample(const scene::SceneBundle& scene,
                                            const geom::GoalPoint& goal,
                                            const scene::DescriptionSet& descriptions,
                                            const std::vector<std::array<double, 2>>& path_array,
                                            const scene::Provenance& provenance);

struct ParsedAnswer {
  std::string dest;
  std::string left;
  std::string right;
  std::string path;
  std::string reco;
  std::vector<std::array<double, 2>> path_array;
};

ParsedAnswer parse_sample_answer(const std::string& answer);
geom::GoalPoint parse_sample_query_goal(const std::string& query);

// Deterministic serialization (sorted keys). The dataset row omits latencies;
// the full per-scene record keeps them.
nlohmann::json sample_to_json(const scene::GeneratedSample& sample);
nlohmann::json sample_to_dataset_row(const scene::GeneratedSample& sample);
scene::GeneratedSample sample_from_json(const nlohmann::json& j);

}  // namespace walkguide::pipeline
