#include "walkguide/pipeline/run.hpp"

#include <atomic>
#include <ctime>
#include <mutex>
#include <sstream>
#include <thread>

#include "walkguide/image/image.hpp"
#include "walkguide/pipeline/sample.hpp"
#include "walkguide/util/error.hpp"
#include "walkguide/util/fsio.hpp"
#include "walkguide/util/jsonl.hpp"
#include "walkguide/util/sha256.hpp"
#include "walkguide/util/text.hpp"

namespace walkguide::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

uint64_t scene_seed(uint64_t run_seed, std::string_view scene_id) {
  std::string tag = std::to_string(run_seed) + "/";
  return util::fnv1a64(scene_id, util::fnv1a64(tag));
}

json RunSummary::to_json() const {
  json j;
  j["generated_at"] = generated_at;
  j["total"] = total;
  j["succeeded"] = succeeded;
  j["failed"] = failed;
  j["resumed"] = resumed;
  j["dry_run"] = dry_run;
  j["mean_latency_s"] = mean_latency_s;
  j["backend_calls"] = backend_calls;
  json fails = json::array();
  for (const auto& o : outcomes)
    if (!o.ok) fails.push_back({{"scene_id", o.scene_id}, {"error", o.error}});
  j["failures"] = fails;
  return j;
}

namespace {

std::string prompt_digest(const scene::SceneBundle& scene, const ScenePlan& plan,
                          const PipelineConfig& config) {
  util::Sha256 h;
  auto add = [&h](const std::string& system_text, const std::string& user_text) {
    h.update(system_text);
    h.update("\x1f");
    h.update(user_text);
    h.update("\x1e");
  };
  if (config.mode == QueryMode::SingleTurn) {
    auto [system_text, user_text] = prompts::render_single_turn_prompt(plan.start, plan.goal);
    add(system_text, user_text);
  } else {
    for (const auto& b : render_multi_turn_prompts(scene, plan, config))
      add(b.system_text, b.user_text);
  }
  return h.hex_digest();
}

void write_debug_artifacts(const fs::path& dir, const scene::SceneBundle& scene,
                           const ScenePlan& plan) {
  util::ensure_dir(dir);
  image::write_mask_png(dir / (scene.scene_id + "_left.png"), plan.masks.left);
  image::write_mask_png(dir / (scene.scene_id + "_right.png"), plan.masks.right);
  image::write_mask_png(dir / (scene.scene_id + "_path.png"), plan.masks.path);
  image::write_png(dir / (scene.scene_id + "_masked_path.png"),
                   geom::mask_image(scene.image, plan.masks.path));
}

struct SceneResult {
  SceneOutcome outcome;
  json dataset_row;  // null when the scene failed or dry-run
};

}  // namespace

RunSummary run_generation(const std::vector<scene::SceneBundle>& scenes,
                          const PipelineConfig& config, const RunOptions& options,
                          gateway::ChatGateway& gateway, const fs::path& out_dir) {
  const fs::path samples_dir = out_dir / "samples";
  util::ensure_dir(samples_dir);

  size_t count = scenes.size();
  if (options.limit >= 0) count = std::min(count, size_t(options.limit));

  const long calls_before = gateway.backend_calls();
  std::vector<SceneResult> results(count);

  auto process_scene = [&](size_t idx) {
    const scene::SceneBundle& scene = scenes[idx];
    SceneResult& slot = results[idx];
    slot.outcome.scene_id = scene.scene_id;
    const fs::path sample_file = samples_dir / (scene.scene_id + ".json");
    try {
      if (!options.dry_run && fs::exists(sample_file)) {
        auto sample = sample_from_json(json::parse(util::read_file(sample_file)));
        slot.dataset_row = sample_to_dataset_row(sample);
        slot.outcome.ok = true;
        slot.outcome.resumed = true;
        slot.outcome.latency_s = sample.descriptions.total_latency_s();
        return;
      }

      geom::GoalPoint goal = geom::sample_goal_point(
          scene.depth, scene.camera, scene_seed(options.seed, scene.scene_id), config.path.goal);
      ScenePlan plan = plan_scene(scene, goal, config);

      if (options.dry_run) {
        // Render every prompt; no model calls, nothing written.
        auto bundles = render_multi_turn_prompts(scene, plan, config);
        if (config.mode == QueryMode::SingleTurn)
          prompts::render_single_turn_prompt(plan.start, plan.goal);
        slot.outcome.ok = true;
        return;
      }

      scene::DescriptionSet descriptions =
          config.mode == QueryMode::MultiTurn
              ? describe_scene_multi_turn(scene, plan, config, gateway)
              : describe_scene_single_turn(scene, goal, config, gateway);

      scene::Provenance provenance;
      provenance.model_id = gateway.backend_id();
      provenance.prompt_hash = prompt_digest(scene, plan, config);

      auto sample = emit_training_sample(scene, goal, descriptions, plan.path_array, provenance);
      util::write_file_atomic(sample_file, sample_to_json(sample).dump(2) + "\n");
      if (options.debug_artifacts) write_debug_artifacts(out_dir / "debug", scene, plan);

      slot.dataset_row = sample_to_dataset_row(sample);
      slot.outcome.ok = true;
      slot.outcome.latency_s = descriptions.total_latency_s();
    } catch (const std::exception& e) {
      slot.outcome.error = e.what();
    }
  };

  if (options.workers <= 1 || count <= 1) {
    for (size_t i = 0; i < count; ++i) {
      process_scene(i);
      if (options.strict && !results[i].outcome.ok)
        throw Error("scene-failure",
                    results[i].outcome.scene_id + ": " + results[i].outcome.error);
    }
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    int workers = std::min<int>(options.workers, int(count));
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (;;) {
          size_t i = next.fetch_add(1);
          if (i >= count) return;
          process_scene(i);
        }
      });
    }
    for (auto& t : pool) t.join();
    if (options.strict) {
      for (const auto& r : results)
        if (!r.outcome.ok)
          throw Error("scene-failure", r.outcome.scene_id + ": " + r.outcome.error);
    }
  }

  RunSummary summary;
  summary.dry_run = options.dry_run;
  summary.total = int(count);
  summary.backend_calls = gateway.backend_calls() - calls_before;
  {
    std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    summary.generated_at = buf;
  }
  double latency_sum = 0;
  std::vector<json> dataset;
  for (auto& r : results) {
    summary.outcomes.push_back(r.outcome);
    if (r.outcome.ok) {
      ++summary.succeeded;
      if (r.outcome.resumed) ++summary.resumed;
      latency_sum += r.outcome.latency_s;
      if (!r.dataset_row.is_null()) dataset.push_back(std::move(r.dataset_row));
    } else {
      ++summary.failed;
    }
  }
  if (summary.succeeded > 0) summary.mean_latency_s = latency_sum / summary.succeeded;

  if (!options.dry_run) util::write_jsonl(out_dir / "dataset.jsonl", dataset);
  util::write_file_atomic(out_dir / "run_summary.json", summary.to_json().dump(2) + "\n");
  return summary;
}

}  // namespace walkguide::pipeline
