#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "walkguide/geom/types.hpp"
#include "walkguide/image/image.hpp"

namespace walkguide::scene {

struct DetectedObject {
  std::string label;             // canonical vocabulary entry or "other:<label>"
  std::array<double, 4> bbox{};  // normalized [x1, y1, x2, y2], top-left origin
  double score = 1.0;
};

// One unit of pipeline work: image, aligned depth, camera, detections.
struct SceneBundle {
  std::string scene_id;
  std::filesystem::path image_path;
  std::filesystem::path depth_path;
  std::filesystem::path detections_path;  // empty when detections were inline or absent
  image::ImageBuffer image;
  geom::DepthMap depth;
  geom::CameraModel camera;
  std::vector<DetectedObject> detections;
};

enum class Passable { Go, Stop };

const char* to_string(Passable p);

// One benchmark annotation row: goal, reference path, five reference texts,
// and the explicit go/stop label.
struct BenchRecord {
  std::string scene_id;
  geom::GoalPoint goal;
  std::vector<std::array<double, 2>> path_array;  // normalized, bottom-to-top
  std::string dest_text;
  std::string left_text;
  std::string right_text;
  std::string path_text;
  std::string reco_text;
  Passable passable = Passable::Go;
};

// The six texts produced per scene. dest/left/right/path/reco are the
// benchmark categories; desc is the whole-image description that feeds the
// recommendation query.
struct DescriptionSet {
  std::string dest;
  std::string left;
  std::string right;
  std::string path;
  std::string desc;
  std::string reco;
  std::array<double, 6> latencies_s{};  // call order: dest,left,right,path,desc,reco

  bool complete() const {
    return !dest.empty() && !left.empty() && !right.empty() && !path.empty() && !desc.empty() &&
           !reco.empty();
  }
  double total_latency_s() const {
    double t = 0;
    for (double v : latencies_s) t += v;
    return t;
  }
};

struct Provenance {
  std::string model_id;
  std::string prompt_hash;
};

struct GeneratedSample {
  std::string scene_id;
  geom::GoalPoint goal;
  std::string query_text;
  std::string answer_text;  // tagged sections, plain text
  DescriptionSet descriptions;
  std::vector<std::array<double, 2>> path_array;
  Provenance provenance;
};

}  // namespace walkguide::scene
