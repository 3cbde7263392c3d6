#include "commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <map>
#include <set>

#include "walkguide/gateway/providers.hpp"
#include "walkguide/pipeline/describe.hpp"
#include "walkguide/pipeline/sample.hpp"
#include "walkguide/scene/manifest.hpp"
#include "walkguide/util/error.hpp"
#include "walkguide/util/fsio.hpp"
#include "walkguide/util/jsonl.hpp"

namespace walkguide::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::shared_ptr<gateway::ChatBackend> make_backend(const BackendSettings& s) {
  if (s.kind == "demo") return gateway::StubChatBackend::demo();
  if (s.kind.rfind("fixed:", 0) == 0) return gateway::StubChatBackend::fixed(s.kind.substr(6));
  if (s.kind == "http") {
    if (s.base_url.empty())
      throw Error("invalid-config", "http backend requires a base URL "
                                    "(--chat-base-url or WALKGUIDE_CHAT_BASE_URL)");
    gateway::HttpBackendConfig cfg;
    cfg.base_url = s.base_url;
    cfg.model_id = s.model_id;
    cfg.api_token = s.api_token;
    cfg.timeout_s = s.timeout_s;
    return std::make_shared<gateway::HttpChatBackend>(cfg);
  }
  throw Error("invalid-config", "unknown backend kind: " + s.kind);
}

pipeline::PipelineConfig pipeline_config_from(const ModeOptions& mode,
                                              const std::string& model_id) {
  pipeline::PipelineConfig config;
  if (mode.mode == "multi-turn") {
    config.mode = pipeline::QueryMode::MultiTurn;
  } else if (mode.mode == "single-turn") {
    config.mode = pipeline::QueryMode::SingleTurn;
  } else {
    throw Error("invalid-config", "mode must be multi-turn or single-turn, got " + mode.mode);
  }
  if (mode.region_style == "masked-image") {
    config.region_style = prompts::RegionStyle::MaskedImage;
  } else if (mode.region_style == "region-prompt") {
    config.region_style = prompts::RegionStyle::RegionPrompt;
  } else {
    throw Error("invalid-config",
                "region-style must be masked-image or region-prompt, got " + mode.region_style);
  }
  config.include_detection_info = mode.detection_info;
  config.path.n_samples = mode.path_samples;
  config.path.half_width_m = mode.half_width_m;
  config.path.cutoff_margin_m = mode.cutoff_margin_m;
  config.path.goal.target_dist_m = mode.target_dist_m;
  config.path.goal.max_angle_deg = mode.max_angle_deg;
  config.model_id = model_id;
  return config;
}

namespace {

gateway::GatewayOptions gateway_options(const CommonOptions& common, const fs::path& out_dir) {
  gateway::GatewayOptions options;
  options.cache_dir = common.cache_dir.empty() ? out_dir / "cache" : fs::path(common.cache_dir);
  options.max_in_flight = std::max(1, common.workers);
  return options;
}

void persist_config(const CommonOptions& common, const fs::path& out_dir) {
  if (common.resolved_config.is_null()) return;
  util::ensure_dir(out_dir);
  util::write_file_atomic(out_dir / "run_config.json", common.resolved_config.dump(2) + "\n");
}

int exit_code_for(int failed, int succeeded, bool strict) {
  if (failed == 0) return 0;
  if (!strict && succeeded >= 1) return 0;
  return 1;
}

// Depth for a bench goal without an annotated distance.
double goal_depth_from_map(const geom::DepthMap& depth, double x_norm, double y_norm) {
  auto px = geom::norm_to_px(x_norm, y_norm, depth.width, depth.height);
  float z = depth.at_nearest(px.x, px.y);
  if (geom::DepthMap::is_valid(z)) return z;
  throw Error("no-valid-depth", "no valid depth at the goal point");
}

}  // namespace

int cmd_generate(const GenerateOptions& options,
                 std::shared_ptr<gateway::ChatBackend> backend_override, std::ostream& log) {
  if (!fs::exists(options.manifest)) {
    log << "error: manifest not found: " << options.manifest << "\n";
    return 2;
  }
  auto loaded = scene::load_manifest(options.manifest, options.common.strict);
  for (const auto& issue : loaded.issues)
    log << "manifest:" << issue.line << " [" << issue.scene_id << "] skipped: " << issue.message
        << "\n";

  const fs::path out_dir = options.out_dir;
  persist_config(options.common, out_dir);

  auto backend = backend_override ? backend_override : make_backend(options.backend);
  gateway::ChatGateway gw(backend, gateway_options(options.common, out_dir));

  pipeline::PipelineConfig config =
      pipeline_config_from(options.mode, options.backend.model_id);
  pipeline::RunOptions run;
  run.seed = options.common.seed;
  run.workers = options.common.workers;
  run.limit = options.common.limit;
  run.strict = options.common.strict;
  run.dry_run = options.common.dry_run;
  run.debug_artifacts = options.debug_artifacts;

  auto summary = pipeline::run_generation(loaded.scenes, config, run, gw, out_dir);
  log << "generate: " << summary.succeeded << " ok, " << summary.failed << " failed, "
      << summary.resumed << " resumed, " << summary.backend_calls << " backend calls\n";
  for (const auto& o : summary.outcomes)
    if (!o.ok) log << "  failed " << o.scene_id << ": " << o.error << "\n";
  return exit_code_for(summary.failed, summary.succeeded, options.common.strict);
}

int cmd_predict(const PredictOptions& options,
                std::shared_ptr<gateway::ChatBackend> backend_override, std::ostream& log) {
  if (!fs::exists(options.bench)) {
    log << "error: bench file not found: " << options.bench << "\n";
    return 2;
  }
  auto bench = scene::load_bench(options.bench);
  auto loaded = scene::load_manifest(options.manifest, options.common.strict);
  std::map<std::string, const scene::SceneBundle*> scenes;
  for (const auto& s : loaded.scenes) scenes[s.scene_id] = &s;

  const fs::path out_dir = options.out_dir;
  util::ensure_dir(out_dir);
  persist_config(options.common, out_dir);
  const fs::path pred_file = out_dir / "predictions.jsonl";

  std::map<std::string, eval::Prediction> existing;
  if (fs::exists(pred_file))
    for (auto& p : eval::load_predictions(pred_file)) existing[p.scene_id] = p;

  auto backend = backend_override ? backend_override : make_backend(options.backend);
  gateway::ChatGateway gw(backend, gateway_options(options.common, out_dir));
  pipeline::PipelineConfig config =
      pipeline_config_from(options.mode, options.backend.model_id);

  size_t count = bench.size();
  if (options.common.limit >= 0) count = std::min(count, size_t(options.common.limit));

  std::vector<eval::Prediction> predictions;
  int failed = 0, resumed = 0;
  for (size_t i = 0; i < count; ++i) {
    const auto& record = bench[i];
    if (auto it = existing.find(record.scene_id); it != existing.end()) {
      predictions.push_back(it->second);
      ++resumed;
      continue;
    }
    try {
      auto scene_it = scenes.find(record.scene_id);
      if (scene_it == scenes.end())
        throw Error("unmatched-scene", "scene missing from manifest: " + record.scene_id);
      const scene::SceneBundle& scene = *scene_it->second;

      geom::GoalPoint goal = record.goal;
      if (goal.depth_m <= 0)
        goal.depth_m = goal_depth_from_map(scene.depth, goal.x_norm, goal.y_norm);

      eval::Prediction pred;
      pred.scene_id = record.scene_id;
      pred.texts = config.mode == pipeline::QueryMode::MultiTurn
                       ? pipeline::describe_scene_multi_turn(scene, goal, config, gw)
                       : pipeline::describe_scene_single_turn(scene, goal, config, gw);
      predictions.push_back(std::move(pred));
    } catch (const std::exception& e) {
      ++failed;
      log << "  failed " << record.scene_id << ": " << e.what() << "\n";
      if (options.common.strict) {
        eval::write_predictions(pred_file, predictions);
        return 1;
      }
    }
  }

  eval::write_predictions(pred_file, predictions);
  log << "predict: " << predictions.size() << " predictions (" << resumed << " resumed), "
      << failed << " failed, " << gw.backend_calls() << " backend calls -> " << pred_file.string()
      << "\n";
  return exit_code_for(failed, int(predictions.size()), options.common.strict);
}

int cmd_evaluate(const EvaluateOptions& options,
                 std::shared_ptr<gateway::ChatBackend> judge_override, std::ostream& log) {
  auto predictions = eval::load_predictions(options.predictions);
  auto bench = scene::load_bench(options.bench);

  const fs::path out_dir = options.out_dir;
  util::ensure_dir(out_dir);
  persist_config(options.common, out_dir);

  eval::EvalConfig config;
  config.metrics_only = options.metrics_only;
  config.judge.model_id = options.judge_model;
  config.workers = options.common.workers;
  std::shared_ptr<gateway::EmbeddingClient> embedder;
  if (!options.embedding_base_url.empty()) {
    const char* token = std::getenv("WALKGUIDE_EMBED_TOKEN");
    gateway::HttpEndpoint ep{options.embedding_base_url, "/v1/embeddings",
                             token ? token : "", 120.0};
    embedder = std::make_shared<gateway::EmbeddingClient>(ep);
    config.embed = [embedder](const std::vector<std::string>& inputs) {
      return embedder->embed(inputs);
    };
  }

  std::unique_ptr<gateway::ChatGateway> judge;
  if (!options.metrics_only) {
    auto backend = judge_override ? judge_override : make_backend(options.judge_backend);
    gateway::GatewayOptions gw_options = gateway_options(options.common, out_dir);
    gw_options.cache_dir = out_dir / "judge_cache";
    judge = std::make_unique<gateway::ChatGateway>(backend, gw_options);
  }

  eval::EvalReport report;
  try {
    report = eval::evaluate_run(predictions, bench, judge.get(), config);
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }
  report.label = options.label;

  util::write_file_atomic(out_dir / "report.json", report.to_json().dump(2) + "\n");
  std::string table = eval::render_report({report}, eval::ReportFormat::Table);
  util::write_file_atomic(out_dir / "report.txt", table);
  util::write_file_atomic(out_dir / "report.csv",
                          eval::render_report({report}, eval::ReportFormat::Delimited));
  log << table;
  return 0;
}

int cmd_ab_compare(const AbCompareOptions& options,
                   std::shared_ptr<gateway::ChatBackend> backend_a,
                   std::shared_ptr<gateway::ChatBackend> backend_b,
                   std::shared_ptr<gateway::ChatBackend> judge_override, std::ostream& log) {
  const fs::path out_dir = options.out_dir;
  util::ensure_dir(out_dir);
  persist_config(options.common, out_dir);

  auto run_arm = [&](const std::string& arm, const ModeOptions& mode,
                     std::shared_ptr<gateway::ChatBackend> backend,
                     eval::EvalReport& report) -> int {
    PredictOptions predict;
    predict.bench = options.bench;
    predict.manifest = options.manifest;
    predict.out_dir = (out_dir / arm).string();
    predict.mode = mode;
    predict.common = options.common;
    predict.common.resolved_config = nullptr;  // only the top-level run persists config
    predict.common.cache_dir = (out_dir / arm / "cache").string();
    predict.backend = options.backend;
    int rc = cmd_predict(predict, backend, log);
    if (rc != 0) return rc;

    EvaluateOptions evaluate;
    evaluate.predictions = (out_dir / arm / "predictions.jsonl").string();
    evaluate.bench = options.bench;
    evaluate.out_dir = (out_dir / arm).string();
    evaluate.label = arm + ":" + mode.mode + "/" + mode.region_style;
    evaluate.metrics_only = options.metrics_only;
    evaluate.judge_model = options.judge_model;
    evaluate.common = options.common;
    evaluate.common.resolved_config = nullptr;
    evaluate.judge_backend = options.judge_backend;
    std::ostringstream sink;
    rc = cmd_evaluate(evaluate, judge_override, sink);
    if (rc != 0) {
      log << sink.str();
      return rc;
    }
    report = eval::EvalReport::from_json(
        nlohmann::json::parse(util::read_file(out_dir / arm / "report.json")));
    return 0;
  };

  eval::EvalReport a, b;
  if (int rc = run_arm("arm_a", options.mode_a, backend_a, a); rc != 0) return rc;
  if (int rc = run_arm("arm_b", options.mode_b, backend_b, b); rc != 0) return rc;

  eval::EvalReport delta;
  delta.label = "delta(b-a)";
  for (size_t c = 0; c < eval::kCategories.size(); ++c)
    delta.categories[c].mean = b.categories[c].mean - a.categories[c].mean;
  delta.overall_avg = b.overall_avg - a.overall_avg;
  delta.mean_word_count = b.mean_word_count - a.mean_word_count;
  delta.mean_latency_s = b.mean_latency_s - a.mean_latency_s;
  delta.go_stop_accuracy = b.go_stop_accuracy - a.go_stop_accuracy;
  delta.rouge_l_mean = b.rouge_l_mean - a.rouge_l_mean;
  delta.meteor_mean = b.meteor_mean - a.meteor_mean;
  delta.scenes = b.scenes;

  std::vector<eval::EvalReport> rows = {a, b, delta};
  std::string table = eval::render_report(rows, eval::ReportFormat::Table);
  util::write_file_atomic(out_dir / "ab_report.txt", table);
  util::write_file_atomic(out_dir / "ab_report.csv",
                          eval::render_report(rows, eval::ReportFormat::Delimited));
  json combined;
  combined["arm_a"] = a.to_json();
  combined["arm_b"] = b.to_json();
  combined["delta"] = delta.to_json();
  util::write_file_atomic(out_dir / "ab_report.json", combined.dump(2) + "\n");
  log << table;
  return 0;
}

int cmd_report(const ReportOptions& options, std::ostream& log) {
  std::vector<eval::EvalReport> rows;
  for (const auto& file : options.report_files) {
    json j = json::parse(util::read_file(file));
    if (j.contains("arm_a")) {
      rows.push_back(eval::EvalReport::from_json(j["arm_a"]));
      rows.push_back(eval::EvalReport::from_json(j["arm_b"]));
      rows.push_back(eval::EvalReport::from_json(j["delta"]));
    } else {
      rows.push_back(eval::EvalReport::from_json(j));
    }
  }
  log << eval::render_report(rows, options.format == "csv" ? eval::ReportFormat::Delimited
                                                           : eval::ReportFormat::Table);
  return 0;
}

}  // namespace walkguide::cli
