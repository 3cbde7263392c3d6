#include "walkguide/scene/manifest.hpp"

#include <set>

#include "walkguide/geom/mask.hpp"
#include "walkguide/util/error.hpp"
#include "walkguide/util/fsio.hpp"
#include "walkguide/util/jsonl.hpp"
#include "walkguide/util/text.hpp"
#include "walkguide/scene/vocabulary.hpp"

namespace walkguide::scene {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(Passable p) { return p == Passable::Go ? "go" : "stop"; }

namespace {

geom::CameraModel camera_from_json(const json& j, int width, int height) {
  geom::CameraModel cam;
  // Desk-scale default: 500 px focal length, principal point at the image
  // center, 0.8 m mount height.
  cam.fx_px = j.value("fx", 500.0);
  cam.fy_px = j.value("fy", 500.0);
  cam.cx_px = j.value("cx", (width - 1) / 2.0);
  cam.cy_px = j.value("cy", (height - 1) / 2.0);
  cam.height_m = j.value("height_m", 0.8);
  if (cam.fx_px <= 0 || cam.fy_px <= 0 || cam.height_m <= 0)
    throw Error("invalid-camera", "focal lengths and height must be positive");
  return cam;
}

DetectedObject object_from_json(const json& j, std::vector<std::string>* warnings) {
  DetectedObject obj;
  std::string raw = j.at("label").get<std::string>();
  obj.label = canonical_label(raw);
  if (obj.label.rfind("other:", 0) == 0 && warnings)
    warnings->push_back("label outside vocabulary: " + raw);
  auto bbox = j.at("bbox");
  if (!bbox.is_array() || bbox.size() != 4)
    throw Error("malformed-record", "bbox must be [x1, y1, x2, y2]");
  for (int i = 0; i < 4; ++i) obj.bbox[i] = bbox[i].get<double>();
  obj.score = j.value("score", 1.0);
  if (!(obj.bbox[0] < obj.bbox[2]) || !(obj.bbox[1] < obj.bbox[3]))
    throw Error("malformed-record", "bbox corners out of order");
  for (double v : obj.bbox)
    if (v < 0.0 || v > 1.0) throw Error("malformed-record", "bbox outside [0,1]");
  return obj;
}

}  // namespace

std::vector<DetectedObject> load_detections(const fs::path& path,
                                            std::vector<std::string>* warnings) {
  json j = json::parse(util::read_file(path));
  if (!j.is_array()) throw Error("malformed-record", path.string() + ": expected JSON array");
  std::vector<DetectedObject> out;
  for (const auto& item : j) out.push_back(object_from_json(item, warnings));
  return out;
}

LoadResult load_manifest(const fs::path& manifest_path, bool strict) {
  LoadResult result;
  const fs::path base = manifest_path.parent_path();
  std::set<std::string> seen_ids;

  for (const auto& line : util::read_jsonl(manifest_path)) {
    std::string scene_id;
    try {
      const json& j = line.value;
      scene_id = j.at("scene_id").get<std::string>();
      if (scene_id.empty()) throw Error("malformed-record", "empty scene_id");
      if (!seen_ids.insert(scene_id).second)
        throw Error("malformed-record", "duplicate scene_id " + scene_id);

      SceneBundle bundle;
      bundle.scene_id = scene_id;
      bundle.image_path = base / j.at("image").get<std::string>();
      bundle.depth_path = base / j.at("depth").get<std::string>();
      bundle.image = image::read_image(bundle.image_path);
      bundle.depth = image::read_depth(bundle.depth_path);
      if (bundle.depth.width != bundle.image.width || bundle.depth.height != bundle.image.height)
        throw Error("dimension-mismatch",
                    "depth dims " + std::to_string(bundle.depth.width) + "x" +
                        std::to_string(bundle.depth.height) + " != image dims " +
                        std::to_string(bundle.image.width) + "x" +
                        std::to_string(bundle.image.height));
      bundle.camera = camera_from_json(j.value("camera", json::object()), bundle.image.width,
                                       bundle.image.height);
      if (j.contains("detections") && !j.at("detections").get<std::string>().empty()) {
        bundle.detections_path = base / j.at("detections").get<std::string>();
        bundle.detections = load_detections(bundle.detections_path, nullptr);
      }
      result.scenes.push_back(std::move(bundle));
    } catch (const std::exception& e) {
      if (strict)
        throw Error("manifest-error", manifest_path.string() + ":" +
                                          std::to_string(line.line_number) + " (" + scene_id +
                                          "): " + e.what());
      result.issues.push_back({line.line_number, scene_id, e.what()});
    }
  }
  return result;
}

nlohmann::json manifest_record_to_json(const SceneBundle& bundle) {
  json j;
  j["scene_id"] = bundle.scene_id;
  j["image"] = bundle.image_path.filename().string();
  j["depth"] = bundle.depth_path.filename().string();
  j["camera"] = {{"fx", bundle.camera.fx_px},
                 {"fy", bundle.camera.fy_px},
                 {"cx", bundle.camera.cx_px},
                 {"cy", bundle.camera.cy_px},
                 {"height_m", bundle.camera.height_m}};
  if (!bundle.detections_path.empty())
    j["detections"] = bundle.detections_path.filename().string();
  return j;
}

BenchRecord bench_record_from_json(const json& j) {
  BenchRecord rec;
  rec.scene_id = j.at("scene_id").get<std::string>();
  auto goal = j.at("goal");
  rec.goal.x_norm = goal.at(0).get<double>();
  rec.goal.y_norm = goal.at(1).get<double>();
  rec.goal.depth_m = j.value("goal_depth_m", 0.0);
  for (const auto& p : j.value("path", json::array()))
    rec.path_array.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  rec.dest_text = j.at("dest_text").get<std::string>();
  rec.left_text = j.at("left_text").get<std::string>();
  rec.right_text = j.at("right_text").get<std::string>();
  rec.path_text = j.at("path_text").get<std::string>();
  rec.reco_text = j.at("reco_text").get<std::string>();
  std::string passable = j.at("passable").get<std::string>();
  if (passable == "go") {
    rec.passable = Passable::Go;
  } else if (passable == "stop") {
    rec.passable = Passable::Stop;
  } else {
    throw Error("malformed-record", "passable must be go or stop, got " + passable);
  }
  return rec;
}

nlohmann::json bench_record_to_json(const BenchRecord& rec) {
  json j;
  j["scene_id"] = rec.scene_id;
  j["goal"] = {rec.goal.x_norm, rec.goal.y_norm};
  if (rec.goal.depth_m > 0) j["goal_depth_m"] = rec.goal.depth_m;
  json path = json::array();
  for (const auto& p : rec.path_array) path.push_back({p[0], p[1]});
  j["path"] = path;
  j["dest_text"] = rec.dest_text;
  j["left_text"] = rec.left_text;
  j["right_text"] = rec.right_text;
  j["path_text"] = rec.path_text;
  j["reco_text"] = rec.reco_text;
  j["passable"] = to_string(rec.passable);
  return j;
}

std::vector<BenchRecord> load_bench(const fs::path& path) {
  std::vector<BenchRecord> out;
  for (const auto& line : util::read_jsonl(path)) {
    try {
      out.push_back(bench_record_from_json(line.value));
    } catch (const std::exception& e) {
      throw Error("malformed-record",
                  path.string() + ":" + std::to_string(line.line_number) + ": " + e.what());
    }
  }
  return out;
}

std::vector<std::string> validate_bench_record(const BenchRecord& rec) {
  std::vector<std::string> violations;
  if (rec.scene_id.empty()) violations.push_back("missing-scene-id");
  if (rec.dest_text.empty()) violations.push_back("missing-text:dest");
  if (rec.left_text.empty()) violations.push_back("missing-text:left");
  if (rec.right_text.empty()) violations.push_back("missing-text:right");
  if (rec.path_text.empty()) violations.push_back("missing-text:path");
  if (rec.reco_text.empty()) violations.push_back("missing-text:reco");
  if (rec.goal.x_norm < 0 || rec.goal.x_norm > 1 || rec.goal.y_norm < 0 || rec.goal.y_norm > 1)
    violations.push_back("goal-out-of-range");
  for (const auto& p : rec.path_array) {
    if (p[0] < 0 || p[0] > 1 || p[1] < 0 || p[1] > 1) {
      violations.push_back("path-out-of-range");
      break;
    }
  }
  if (!rec.reco_text.empty()) {
    bool go_prefix = util::starts_with_icase(util::trim(rec.reco_text), "follow the path");
    bool stop_prefix = util::starts_with_icase(util::trim(rec.reco_text), "stop and wait");
    bool matches = (rec.passable == Passable::Go && go_prefix) ||
                   (rec.passable == Passable::Stop && stop_prefix);
    if (!matches) violations.push_back("reco-label-mismatch");
  }
  return violations;
}

std::vector<DetectedObject> filter_objects_by_region(const std::vector<DetectedObject>& objects,
                                                     const geom::Mask& mask, double min_overlap) {
  std::vector<DetectedObject> out;
  for (const auto& obj : objects) {
    if (geom::region_overlap(obj.bbox, mask) > min_overlap) out.push_back(obj);
  }
  return out;
}

}  // namespace walkguide::scene
