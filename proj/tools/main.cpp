#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "commands.hpp"
#include "walkguide/util/error.hpp"
#include "walkguide/util/fsio.hpp"

using nlohmann::json;
namespace cli = walkguide::cli;

namespace {

struct Settings {
  std::string manifest;
  std::string bench;
  std::string predictions;
  std::string out = "out";
  std::vector<std::string> report_files;

  std::string mode = "multi-turn";
  std::string region_style = "masked-image";
  bool no_detection_info = false;
  int path_samples = 20;
  double half_width_m = 1.0;
  double cutoff_margin_m = 3.0;
  double target_dist_m = 10.0;
  double max_angle_deg = 45.0;

  std::string mode_a = "multi-turn";
  std::string region_style_a = "masked-image";
  std::string mode_b = "single-turn";
  std::string region_style_b = "masked-image";

  std::uint64_t seed = 0;
  int workers = 1;
  int limit = -1;
  bool strict = false;
  bool dry_run = false;
  bool debug_artifacts = false;
  std::string cache_dir;

  std::string backend = "demo";
  std::string chat_base_url;
  std::string chat_model;
  std::string judge_backend = "demo";
  std::string judge_base_url;
  std::string judge_model;
  std::string embed_base_url;

  bool metrics_only = false;
  bool judge_arms = false;
  std::string label = "model";
  std::string format = "table";
};

template <typename T>
void from_config(const json& j, const char* key, T& value) {
  if (j.contains(key)) value = j.at(key).get<T>();
}

void apply_config_file(const json& j, Settings& s) {
  from_config(j, "manifest", s.manifest);
  from_config(j, "bench", s.bench);
  from_config(j, "predictions", s.predictions);
  from_config(j, "out", s.out);
  from_config(j, "mode", s.mode);
  from_config(j, "region_style", s.region_style);
  from_config(j, "no_detection_info", s.no_detection_info);
  from_config(j, "path_samples", s.path_samples);
  from_config(j, "half_width_m", s.half_width_m);
  from_config(j, "cutoff_margin_m", s.cutoff_margin_m);
  from_config(j, "target_dist_m", s.target_dist_m);
  from_config(j, "max_angle_deg", s.max_angle_deg);
  from_config(j, "mode_a", s.mode_a);
  from_config(j, "region_style_a", s.region_style_a);
  from_config(j, "mode_b", s.mode_b);
  from_config(j, "region_style_b", s.region_style_b);
  from_config(j, "seed", s.seed);
  from_config(j, "workers", s.workers);
  from_config(j, "limit", s.limit);
  from_config(j, "strict", s.strict);
  from_config(j, "dry_run", s.dry_run);
  from_config(j, "debug_artifacts", s.debug_artifacts);
  from_config(j, "cache_dir", s.cache_dir);
  from_config(j, "backend", s.backend);
  from_config(j, "chat_base_url", s.chat_base_url);
  from_config(j, "chat_model", s.chat_model);
  from_config(j, "judge_backend", s.judge_backend);
  from_config(j, "judge_base_url", s.judge_base_url);
  from_config(j, "judge_model", s.judge_model);
  from_config(j, "embed_base_url", s.embed_base_url);
  from_config(j, "metrics_only", s.metrics_only);
  from_config(j, "judge_arms", s.judge_arms);
  from_config(j, "label", s.label);
  from_config(j, "format", s.format);
}

void apply_env(Settings& s) {
  auto env = [](const char* name) -> std::string {
    const char* v = std::getenv(name);
    return v ? v : "";
  };
  if (auto v = env("WALKGUIDE_CHAT_BASE_URL"); !v.empty()) s.chat_base_url = v;
  if (auto v = env("WALKGUIDE_CHAT_MODEL"); !v.empty()) s.chat_model = v;
  if (auto v = env("WALKGUIDE_JUDGE_BASE_URL"); !v.empty()) s.judge_base_url = v;
  if (auto v = env("WALKGUIDE_JUDGE_MODEL"); !v.empty()) s.judge_model = v;
  if (auto v = env("WALKGUIDE_EMBED_BASE_URL"); !v.empty()) s.embed_base_url = v;
  if (auto v = env("WALKGUIDE_CACHE_DIR"); !v.empty()) s.cache_dir = v;
}

json resolved_json(const Settings& s, const std::string& command) {
  // Everything needed to reproduce the run; secrets stay in the environment.
  json j;
  j["command"] = command;
  j["manifest"] = s.manifest;
  j["bench"] = s.bench;
  j["predictions"] = s.predictions;
  j["out"] = s.out;
  j["mode"] = s.mode;
  j["region_style"] = s.region_style;
  j["no_detection_info"] = s.no_detection_info;
  j["path_samples"] = s.path_samples;
  j["half_width_m"] = s.half_width_m;
  j["cutoff_margin_m"] = s.cutoff_margin_m;
  j["target_dist_m"] = s.target_dist_m;
  j["max_angle_deg"] = s.max_angle_deg;
  j["mode_a"] = s.mode_a;
  j["region_style_a"] = s.region_style_a;
  j["mode_b"] = s.mode_b;
  j["region_style_b"] = s.region_style_b;
  j["seed"] = s.seed;
  j["workers"] = s.workers;
  j["limit"] = s.limit;
  j["strict"] = s.strict;
  j["dry_run"] = s.dry_run;
  j["debug_artifacts"] = s.debug_artifacts;
  j["cache_dir"] = s.cache_dir;
  j["backend"] = s.backend;
  j["chat_base_url"] = s.chat_base_url;
  j["chat_model"] = s.chat_model;
  j["judge_backend"] = s.judge_backend;
  j["judge_base_url"] = s.judge_base_url;
  j["judge_model"] = s.judge_model;
  j["embed_base_url"] = s.embed_base_url;
  j["metrics_only"] = s.metrics_only;
  j["judge_arms"] = s.judge_arms;
  j["label"] = s.label;
  j["format"] = s.format;
  return j;
}

cli::ModeOptions mode_options(const Settings& s, const std::string& mode,
                              const std::string& style) {
  cli::ModeOptions m;
  m.mode = mode;
  m.region_style = style;
  m.detection_info = !s.no_detection_info;
  m.path_samples = s.path_samples;
  m.half_width_m = s.half_width_m;
  m.cutoff_margin_m = s.cutoff_margin_m;
  m.target_dist_m = s.target_dist_m;
  m.max_angle_deg = s.max_angle_deg;
  return m;
}

cli::CommonOptions common_options(const Settings& s, const std::string& command) {
  cli::CommonOptions c;
  c.seed = s.seed;
  c.workers = s.workers;
  c.limit = s.limit;
  c.strict = s.strict;
  c.dry_run = s.dry_run;
  c.cache_dir = s.cache_dir;
  c.resolved_config = resolved_json(s, command);
  return c;
}

cli::BackendSettings chat_backend(const Settings& s) {
  cli::BackendSettings b;
  b.kind = s.backend;
  b.base_url = s.chat_base_url;
  b.model_id = s.chat_model;
  const char* token = std::getenv("WALKGUIDE_CHAT_TOKEN");
  if (token) b.api_token = token;
  return b;
}

cli::BackendSettings judge_backend(const Settings& s) {
  cli::BackendSettings b;
  b.kind = s.judge_backend;
  b.base_url = s.judge_base_url;
  b.model_id = s.judge_model;
  const char* token = std::getenv("WALKGUIDE_JUDGE_TOKEN");
  if (token) b.api_token = token;
  return b;
}

}  // namespace

int main(int argc, char** argv) {
  Settings s;

  // Config file first, then environment, then flags.
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      try {
        apply_config_file(json::parse(walkguide::util::read_file(argv[i + 1])), s);
      } catch (const std::exception& e) {
        std::cerr << "error: cannot load config " << argv[i + 1] << ": " << e.what() << "\n";
        return 2;
      }
    }
  }
  apply_env(s);

  CLI::App app{"Walking-guidance data generation and benchmark harness"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_file;
  app.add_option("--config", config_file, "JSON config file (lowest precedence)");
  app.add_option("--seed", s.seed, "Run seed");
  app.add_option("--workers", s.workers, "Parallel workers");
  app.add_option("--limit", s.limit, "Process at most N scenes");
  app.add_flag("--strict", s.strict, "Abort on the first failure");
  app.add_flag("--dry-run", s.dry_run, "Render prompts without calling any backend");
  app.add_option("--cache-dir", s.cache_dir, "Response cache directory");
  app.add_option("--backend", s.backend, "Chat backend: demo, fixed:<text>, http");
  app.add_option("--chat-base-url", s.chat_base_url, "OpenAI-compatible base URL");
  app.add_option("--chat-model", s.chat_model, "Chat model id");
  app.add_option("--judge-backend", s.judge_backend, "Judge backend: demo, fixed:<text>, http");
  app.add_option("--judge-base-url", s.judge_base_url, "Judge base URL");
  app.add_option("--judge-model", s.judge_model, "Judge model id");

  auto add_mode_flags = [&](CLI::App* cmd) {
    cmd->add_option("--mode", s.mode, "multi-turn or single-turn");
    cmd->add_option("--region-style", s.region_style, "masked-image or region-prompt");
    cmd->add_flag("--no-detection-info", s.no_detection_info, "Omit detector outputs from prompts");
    cmd->add_option("--path-samples", s.path_samples, "Polyline sample count");
    cmd->add_option("--half-width", s.half_width_m, "Path half width in meters");
    cmd->add_option("--cutoff-margin", s.cutoff_margin_m, "Behind-goal cutoff margin in meters");
    cmd->add_option("--target-dist", s.target_dist_m, "Goal sampling distance in meters");
    cmd->add_option("--max-angle", s.max_angle_deg, "Goal sampling angle bound in degrees");
  };

  auto* generate = app.add_subcommand("generate", "Generate training samples from a manifest");
  generate->add_option("--manifest", s.manifest, "Scene manifest (JSONL)");
  generate->add_option("--out", s.out, "Output directory");
  generate->add_flag("--debug-artifacts", s.debug_artifacts, "Write masks and masked images");
  add_mode_flags(generate);

  auto* predict = app.add_subcommand("predict", "Describe benchmark scenes with a model");
  predict->add_option("--bench", s.bench, "Benchmark records (JSONL)");
  predict->add_option("--manifest", s.manifest, "Scene manifest (JSONL)");
  predict->add_option("--out", s.out, "Output directory");
  add_mode_flags(predict);

  auto* evaluate = app.add_subcommand("evaluate", "Judge and score predictions against the bench");
  evaluate->add_option("--predictions", s.predictions, "Predictions file (JSONL)");
  evaluate->add_option("--bench", s.bench, "Benchmark records (JSONL)");
  evaluate->add_option("--out", s.out, "Output directory");
  evaluate->add_option("--label", s.label, "Row label in the report");
  evaluate->add_flag("--metrics-only", s.metrics_only, "Skip judging; text metrics only");
  evaluate->add_option("--embed-base-url", s.embed_base_url,
                       "Embeddings endpoint enabling the embedding-F1 column");

  auto* ab = app.add_subcommand("ab-compare", "Run two configurations on the same bench slice");
  ab->add_option("--bench", s.bench, "Benchmark records (JSONL)");
  ab->add_option("--manifest", s.manifest, "Scene manifest (JSONL)");
  ab->add_option("--out", s.out, "Output directory");
  ab->add_option("--mode-a", s.mode_a, "Arm A query mode");
  ab->add_option("--region-style-a", s.region_style_a, "Arm A region style");
  ab->add_option("--mode-b", s.mode_b, "Arm B query mode");
  ab->add_option("--region-style-b", s.region_style_b, "Arm B region style");
  ab->add_flag("--judge-arms", s.judge_arms, "Judge both arms instead of metrics only");
  add_mode_flags(ab);

  auto* report = app.add_subcommand("report", "Render saved report files");
  report->add_option("files", s.report_files, "report.json files")->required();
  report->add_option("--format", s.format, "table or csv");

  CLI11_PARSE(app, argc, argv);

  auto require = [](const std::string& value, const char* what) {
    if (value.empty()) {
      std::cerr << "error: missing " << what << " (flag or config file)\n";
      return false;
    }
    return true;
  };

  try {
    if (generate->parsed()) {
      if (!require(s.manifest, "--manifest")) return 2;
      cli::GenerateOptions o;
      o.manifest = s.manifest;
      o.out_dir = s.out;
      o.mode = mode_options(s, s.mode, s.region_style);
      o.common = common_options(s, "generate");
      o.backend = chat_backend(s);
      o.debug_artifacts = s.debug_artifacts;
      return cli::cmd_generate(o);
    }
    if (predict->parsed()) {
      if (!require(s.bench, "--bench") || !require(s.manifest, "--manifest")) return 2;
      cli::PredictOptions o;
      o.bench = s.bench;
      o.manifest = s.manifest;
      o.out_dir = s.out;
      o.mode = mode_options(s, s.mode, s.region_style);
      o.common = common_options(s, "predict");
      o.backend = chat_backend(s);
      return cli::cmd_predict(o);
    }
    if (evaluate->parsed()) {
      if (!require(s.predictions, "--predictions") || !require(s.bench, "--bench")) return 2;
      cli::EvaluateOptions o;
      o.predictions = s.predictions;
      o.bench = s.bench;
      o.out_dir = s.out;
      o.label = s.label;
      o.metrics_only = s.metrics_only;
      o.judge_model = s.judge_model;
      o.embedding_base_url = s.embed_base_url;
      o.common = common_options(s, "evaluate");
      o.judge_backend = judge_backend(s);
      return cli::cmd_evaluate(o);
    }
    if (ab->parsed()) {
      if (!require(s.bench, "--bench") || !require(s.manifest, "--manifest")) return 2;
      cli::AbCompareOptions o;
      o.bench = s.bench;
      o.manifest = s.manifest;
      o.out_dir = s.out;
      o.mode_a = mode_options(s, s.mode_a, s.region_style_a);
      o.mode_b = mode_options(s, s.mode_b, s.region_style_b);
      o.metrics_only = !s.judge_arms;
      o.judge_model = s.judge_model;
      o.common = common_options(s, "ab-compare");
      o.backend = chat_backend(s);
      o.judge_backend = judge_backend(s);
      return cli::cmd_ab_compare(o);
    }
    if (report->parsed()) {
      cli::ReportOptions o;
      o.report_files = s.report_files;
      o.format = s.format;
      return cli::cmd_report(o);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
