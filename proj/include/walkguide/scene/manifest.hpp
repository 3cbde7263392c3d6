#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "walkguide/geom/types.hpp"
#include "walkguide/scene/types.hpp"

namespace walkguide::scene {

struct ManifestIssue {
  int line = 0;
  std::string scene_id;
  std::string message;
};

struct LoadResult {
  std::vector<SceneBundle> scenes;
  std::vector<ManifestIssue> issues;
};

// Line-delimited JSON manifest: one scene per line with scene_id, image path,
// depth path, camera parameters, and an optional detections path. Paths are
// resolved relative to the manifest file. Records failing validation are
// reported and skipped; in strict mode the first failure aborts.
LoadResult load_manifest(const std::filesystem::path& manifest_path, bool strict = false);

// JSON array of {label, bbox, score}. Labels outside the vocabulary map to
// "other:<label>" with an issue note appended to `warnings` when given.
std::vector<DetectedObject> load_detections(const std::filesystem::path& path,
                                            std::vector<std::string>* warnings = nullptr);

nlohmann::json manifest_record_to_json(const SceneBundle& bundle);

std::vector<BenchRecord> load_bench(const std::filesystem::path& path);
nlohmann::json bench_record_to_json(const BenchRecord& record);
BenchRecord bench_record_from_json(const nlohmann::json& j);

// Empty result means the record is valid; otherwise one short code per
// violation ("goal-out-of-range", "reco-label-mismatch", ...).
std::vector<std::string> validate_bench_record(const BenchRecord& record);

// Keeps objects whose overlap with the mask exceeds min_overlap, preserving
// input order.
std::vector<DetectedObject> filter_objects_by_region(const std::vector<DetectedObject>& objects,
                                                     const geom::Mask& mask,
                                                     double min_overlap = 0.0);

}  // namespace walkguide::scene
