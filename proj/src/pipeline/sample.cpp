#include "walkguide/pipeline/sample.hpp"

#include "walkguide/prompts/prompts.hpp"
#include "walkguide/util/error.hpp"

namespace walkguide::pipeline {

using nlohmann::json;

std::string render_sample_query(const geom::GoalPoint& goal) {
  return "<image>\nAssume the user is moving from the starting point [0.5, 1.0] to the "
         "destination point " +
         prompts::format_point({goal.x_norm, goal.y_norm}) +
         " in the image. Describe the destination, the left and right sides of the path, and "
         "the path itself, decide whether the user can follow the path, and give the path to "
         "the destination.";
}

namespace {

std::string render_path_array(const std::vector<std::array<double, 2>>& points) {
  std::string out = "[";
  for (size_t i = 0; i < points.size(); ++i) {
    if (i) out += ", ";
    out += prompts::format_point({points[i][0], points[i][1]});
  }
  out += "]";
  return out;
}

}  // namespace

std::string render_sample_answer(const scene::DescriptionSet& d,
                                 const std::vector<std::array<double, 2>>& path_array) {
  if (!d.complete()) throw Error("incomplete-descriptions", "all six texts are required");
  return "<dest_desc>" + d.dest + "</dest_desc>\n" +
         "<left_desc>" + d.left + "</left_desc>\n" +
         "<right_desc>" + d.right + "</right_desc>\n" +
         "<path_desc>" + d.path + "</path_desc>\n" +
         "<reco_desc>" + d.reco + "</reco_desc>\n" +
         "<path_array>" + render_path_array(path_array) + "</path_array>";
}

scene::GeneratedSample emit_training_sample(const scene::SceneBundle& scene,
                                            const geom::GoalPoint& goal,
                                            const scene::DescriptionSet& descriptions,
                                            const std::vector<std::array<double, 2>>& path_array,
                                            const scene::Provenance& provenance) {
  scene::GeneratedSample sample;
  sample.scene_id = scene.scene_id;
  sample.goal = goal;
  sample.query_text = render_sample_query(goal);
  sample.answer_text = render_sample_answer(descriptions, path_array);
  sample.descriptions = descriptions;
  sample.path_array = path_array;
  sample.provenance = provenance;
  return sample;
}

namespace {

std::string extract_tag(const std::string& text, const std::string& tag) {
  std::string open = "<" + tag + ">";
  std::string close = "</" + tag + ">";
  size_t a = text.find(open);
  size_t b = text.find(close);
  if (a == std::string::npos || b == std::string::npos || b < a)
    throw Error("parse-failure", "missing <" + tag + "> section");
  return text.substr(a + open.size(), b - a - open.size());
}

}  // namespace

ParsedAnswer parse_sample_answer(const std::string& answer) {
  ParsedAnswer out;
  out.dest = extract_tag(answer, "dest_desc");
  out.left = extract_tag(answer, "left_desc");
  out.right = extract_tag(answer, "right_desc");
  out.path = extract_tag(answer, "path_desc");
  out.reco = extract_tag(answer, "reco_desc");
  std::string arr = extract_tag(answer, "path_array");
  try {
    json parsed = json::parse(arr);
    for (const auto& p : parsed) out.path_array.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  } catch (const json::exception& e) {
    throw Error("parse-failure", std::string("bad path array: ") + e.what());
  }
  return out;
}

geom::GoalPoint parse_sample_query_goal(const std::string& query) {
  const std::string anchor = "destination point [";
  size_t a = query.find(anchor);
  if (a == std::string::npos) throw Error("parse-failure", "no destination point in query");
  size_t b = query.find(']', a);
  if (b == std::string::npos) throw Error("parse-failure", "unterminated destination point");
  std::string coords = query.substr(a + anchor.size(), b - a - anchor.size());
  size_t comma = coords.find(',');
  if (comma == std::string::npos) throw Error("parse-failure", "bad destination point");
  geom::GoalPoint goal;
  goal.x_norm = std::stod(coords.substr(0, comma));
  goal.y_norm = std::stod(coords.substr(comma + 1));
  return goal;
}

json sample_to_json(const scene::GeneratedSample& s) {
  json j = sample_to_dataset_row(s);
  j["descriptions"] = {{"dest", s.descriptions.dest},   {"left", s.descriptions.left},
                       {"right", s.descriptions.right}, {"path", s.descriptions.path},
                       {"desc", s.descriptions.desc},   {"reco", s.descriptions.reco}};
  j["latencies_s"] = s.descriptions.latencies_s;
  return j;
}

json sample_to_dataset_row(const scene::GeneratedSample& s) {
  json j;
  j["scene_id"] = s.scene_id;
  j["goal"] = {s.goal.x_norm, s.goal.y_norm};
  j["goal_depth_m"] = s.goal.depth_m;
  j["query"] = s.query_text;
  j["answer"] = s.answer_text;
  json path = json::array();
  for (const auto& p : s.path_array) path.push_back({p[0], p[1]});
  j["path_array"] = path;
  j["provenance"] = {{"model_id", s.provenance.model_id}, {"prompt_hash", s.provenance.prompt_hash}};
  return j;
}

scene::GeneratedSample sample_from_json(const json& j) {
  scene::GeneratedSample s;
  s.scene_id = j.at("scene_id").get<std::string>();
  s.goal.x_norm = j.at("goal").at(0).get<double>();
  s.goal.y_norm = j.at("goal").at(1).get<double>();
  s.goal.depth_m = j.value("goal_depth_m", 0.0);
  s.query_text = j.at("query").get<std::string>();
  s.answer_text = j.at("answer").get<std::string>();
  for (const auto& p : j.value("path_array", json::array()))
    s.path_array.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  if (j.contains("descriptions")) {
    const auto& d = j["descriptions"];
    s.descriptions.dest = d.value("dest", "");
    s.descriptions.left = d.value("left", "");
    s.descriptions.right = d.value("right", "");
    s.descriptions.path = d.value("path", "");
    s.descriptions.desc = d.value("desc", "");
    s.descriptions.reco = d.value("reco", "");
  }
  if (j.contains("latencies_s")) {
    auto lat = j["latencies_s"];
    for (size_t i = 0; i < 6 && i < lat.size(); ++i)
      s.descriptions.latencies_s[i] = lat[i].get<double>();
  }
  if (j.contains("provenance")) {
    s.provenance.model_id = j["provenance"].value("model_id", "");
    s.provenance.prompt_hash = j["provenance"].value("prompt_hash", "");
  }
  return s;
}

}  // namespace walkguide::pipeline
