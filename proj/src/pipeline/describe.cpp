#include "walkguide/pipeline/describe.hpp"

#include <chrono>

#include "walkguide/scene/manifest.hpp"
#include "walkguide/util/error.hpp"
#include "walkguide/util/text.hpp"

namespace walkguide::pipeline {

using prompts::QueryKind;
using prompts::RegionStyle;
using prompts::SystemKind;

const char* to_string(RecoLabel label) {
  switch (label) {
    case RecoLabel::Go: return "go";
    case RecoLabel::Stop: return "stop";
    case RecoLabel::Unknown: return "unknown";
  }
  return "?";
}

const char* to_string(QueryMode mode) {
  return mode == QueryMode::MultiTurn ? "multi-turn" : "single-turn";
}

ScenePlan plan_scene(const scene::SceneBundle& scene, const geom::GoalPoint& goal,
                     const PipelineConfig& config) {
  ScenePlan plan;
  plan.geometry = geom::build_path_geometry(scene.depth, scene.camera, goal, config.path);
  plan.masks = geom::rasterize_masks(plan.geometry.polygons, scene.image.width,
                                     scene.image.height, scene.depth,
                                     plan.geometry.cutoff_depth_m);
  plan.left_objects =
      scene::filter_objects_by_region(scene.detections, plan.masks.left, config.min_region_overlap);
  plan.right_objects = scene::filter_objects_by_region(scene.detections, plan.masks.right,
                                                       config.min_region_overlap);
  plan.path_objects =
      scene::filter_objects_by_region(scene.detections, plan.masks.path, config.min_region_overlap);
  plan.goal = {goal.x_norm, goal.y_norm};
  for (const auto& sample : plan.geometry.polyline)
    plan.path_array.push_back({geom::px_to_norm_x(sample.point.x, scene.image.width),
                               geom::px_to_norm_y(sample.point.y, scene.image.height)});
  return plan;
}

namespace {

gateway::ImageAttachment attach_png(const image::ImageBuffer& img) {
  return {"image/png", image::encode_png(img)};
}

std::string system_for(SystemKind kind, const std::vector<scene::DetectedObject>& objects,
                       bool include_detection_info) {
  if (!include_detection_info || objects.empty()) return prompts::render_system_prompt(kind);
  return prompts::render_system_prompt(kind, &objects);
}

gateway::ChatResponse run_query(gateway::ChatGateway& gw, const PipelineConfig& config,
                                std::string system_text, std::string user_text,
                                gateway::ImageAttachment image) {
  gateway::ChatRequest req;
  req.system_text = std::move(system_text);
  req.user_turns.push_back({std::move(user_text), std::move(image)});
  req.model_id = config.model_id;
  req.max_tokens = config.max_tokens;
  return gw.complete(req);
}

}  // namespace

std::vector<prompts::PromptBundle> render_multi_turn_prompts(const scene::SceneBundle& scene,
                                                             const ScenePlan& plan,
                                                             const PipelineConfig& config) {
  const bool det = config.include_detection_info;
  std::vector<prompts::PromptBundle> out;

  prompts::PromptBundle dest;
  dest.system_text = system_for(SystemKind::General, scene.detections, det);
  dest.user_text =
      prompts::render_region_user_prompt(QueryKind::Dest, config.region_style, plan.start, plan.goal);
  out.push_back(dest);

  auto region = [&](QueryKind kind, const std::vector<scene::DetectedObject>& objects) {
    prompts::PromptBundle b;
    b.system_text = system_for(SystemKind::General, objects, det);
    b.user_text = prompts::render_region_user_prompt(kind, config.region_style, plan.start, plan.goal);
    if (config.region_style == RegionStyle::MaskedImage) {
      b.attach_full_image = false;
      b.attach_masked_region = kind;
    }
    return b;
  };
  out.push_back(region(QueryKind::Left, plan.left_objects));
  out.push_back(region(QueryKind::Right, plan.right_objects));
  out.push_back(region(QueryKind::Path, plan.path_objects));

  prompts::PromptBundle desc;
  desc.system_text = system_for(SystemKind::General, scene.detections, det);
  desc.user_text = prompts::render_whole_image_prompt();
  out.push_back(desc);

  prompts::PromptBundle reco;
  reco.system_text = prompts::render_system_prompt(SystemKind::Recommendation);
  scene::DescriptionSet pending;
  pending.dest = pending.left = pending.right = pending.path = pending.desc = "(pending)";
  reco.user_text = prompts::render_recommendation_prompt(pending);
  out.push_back(reco);

  return out;
}

scene::DescriptionSet describe_scene_multi_turn(const scene::SceneBundle& scene,
                                                const geom::GoalPoint& goal,
                                                const PipelineConfig& config,
                                                gateway::ChatGateway& gateway) {
  return describe_scene_multi_turn(scene, plan_scene(scene, goal, config), config, gateway);
}

scene::DescriptionSet describe_scene_multi_turn(const scene::SceneBundle& scene,
                                                const ScenePlan& plan,
                                                const PipelineConfig& config,
                                                gateway::ChatGateway& gw) {
  const bool det = config.include_detection_info;
  const bool masked = config.region_style == RegionStyle::MaskedImage;
  gateway::ImageAttachment full = attach_png(scene.image);

  scene::DescriptionSet set;

  auto dest = run_query(
      gw, config, system_for(SystemKind::General, scene.detections, det),
      prompts::render_region_user_prompt(QueryKind::Dest, config.region_style, plan.start, plan.goal),
      full);
  set.dest = dest.text;
  set.latencies_s[0] = dest.latency_s;

  auto region_call = [&](QueryKind kind, const geom::Mask& mask,
                         const std::vector<scene::DetectedObject>& objects) {
    gateway::ImageAttachment img =
        masked ? attach_png(geom::mask_image(scene.image, mask)) : full;
    return run_query(gw, config, system_for(SystemKind::General, objects, det),
                     prompts::render_region_user_prompt(kind, config.region_style, plan.start,
                                                        plan.goal),
                     std::move(img));
  };

  auto left = region_call(QueryKind::Left, plan.masks.left, plan.left_objects);
  set.left = left.text;
  set.latencies_s[1] = left.latency_s;

  auto right = region_call(QueryKind::Right, plan.masks.right, plan.right_objects);
  set.right = right.text;
  set.latencies_s[2] = right.latency_s;

  auto path = region_call(QueryKind::Path, plan.masks.path, plan.path_objects);
  set.path = path.text;
  set.latencies_s[3] = path.latency_s;

  auto desc = run_query(gw, config, system_for(SystemKind::General, scene.detections, det),
                        prompts::render_whole_image_prompt(), full);
  set.desc = desc.text;
  set.latencies_s[4] = desc.latency_s;

  // The recommendation turn consumes the five texts; no detection clause here.
  auto reco = run_query(gw, config, prompts::render_system_prompt(SystemKind::Recommendation),
                        prompts::render_recommendation_prompt(set), full);
  set.reco = reco.text;
  set.latencies_s[5] = reco.latency_s;

  return set;
}

scene::DescriptionSet describe_scene_single_turn(const scene::SceneBundle& scene,
                                                 const geom::GoalPoint& goal,
                                                 const PipelineConfig& config,
                                                 gateway::ChatGateway& gw) {
  prompts::NormPoint start{0.5, 1.0};
  prompts::NormPoint goal_pt{goal.x_norm, goal.y_norm};
  auto [system_text, user_text] = prompts::render_single_turn_prompt(start, goal_pt);
  if (config.include_detection_info && !scene.detections.empty())
    system_text = prompts::render_system_prompt(SystemKind::Recommendation, &scene.detections);

  auto response = run_query(gw, config, std::move(system_text), std::move(user_text),
                            attach_png(scene.image));

  std::array<std::string, 6> sections;
  try {
    sections = parse_numbered_answer(response.text);
  } catch (const Error& e) {
    // keep the raw text with the failure so callers can inspect it
    throw Error(e.code(), std::string(e.what()) + "; raw answer: " + response.text);
  }

  scene::DescriptionSet set;
  set.dest = sections[0];
  set.left = sections[1];
  set.right = sections[2];
  set.path = sections[3];
  set.desc = sections[4];
  set.reco = sections[5];
  set.latencies_s[0] = response.latency_s;
  return set;
}

std::array<std::string, 6> parse_numbered_answer(const std::string& text,
                                                 std::vector<std::string>* warnings) {
  std::array<std::string, 6> sections;
  std::array<bool, 6> seen{};

  // Collect line-initial "<n>." markers.
  struct Marker {
    size_t body_start;
    size_t line_start;
    int section;
  };
  std::vector<Marker> markers;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t line_end = text.find('\n', pos);
    if (line_end == std::string::npos) line_end = text.size();
    size_t i = pos;
    while (i < line_end && (text[i] == ' ' || text[i] == '\t')) ++i;
    if (i + 1 < line_end && text[i] >= '1' && text[i] <= '6' && text[i + 1] == '.')
      markers.push_back({i + 2, pos, text[i] - '0'});
    if (line_end == text.size()) break;
    pos = line_end + 1;
  }

  for (size_t m = 0; m < markers.size(); ++m) {
    int n = markers[m].section;
    size_t end = m + 1 < markers.size() ? markers[m + 1].line_start : text.size();
    std::string body = util::trim(text.substr(markers[m].body_start, end - markers[m].body_start));
    const char* header = prompts::single_turn_section_header(n);
    if (util::starts_with_icase(body, header))
      body = util::trim(body.substr(std::string_view(header).size()));
    if (seen[n - 1]) {
      if (warnings)
        warnings->push_back("duplicate section " + std::to_string(n) + "; first occurrence kept");
      continue;
    }
    seen[n - 1] = true;
    sections[n - 1] = body;
  }

  std::string missing;
  for (int n = 1; n <= 6; ++n) {
    if (!seen[n - 1]) missing += (missing.empty() ? "" : ", ") + std::to_string(n);
  }
  if (!missing.empty())
    throw Error("parse-failure", "missing numbered sections: " + missing);
  return sections;
}

RecoLabel parse_reco_label(std::string_view reco_text) {
  std::string trimmed = util::trim(reco_text);
  if (util::starts_with_icase(trimmed, "follow the path")) return RecoLabel::Go;
  if (util::starts_with_icase(trimmed, "stop and wait")) return RecoLabel::Stop;
  return RecoLabel::Unknown;
}

}  // namespace walkguide::pipeline
