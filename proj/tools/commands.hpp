#pragma once

#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "walkguide/eval/report.hpp"
#include "walkguide/gateway/chat.hpp"
#include "walkguide/pipeline/run.hpp"

namespace walkguide::cli {

struct BackendSettings {
  std::string kind = "demo";  // "demo", "fixed:<text>", or "http"
  std::string base_url;
  std::string model_id;
  std::string api_token;  // environment only, never persisted
  double timeout_s = 120.0;
};

// Builds the configured backend; "http" requires a base URL.
std::shared_ptr<gateway::ChatBackend> make_backend(const BackendSettings& settings);

struct CommonOptions {
  uint64_t seed = 0;
  int workers = 1;
  int limit = -1;
  bool strict = false;
  bool dry_run = false;
  std::string cache_dir;  // empty -> <out>/cache
  nlohmann::json resolved_config;  // persisted next to outputs for provenance
};

struct ModeOptions {
  std::string mode = "multi-turn";           // or "single-turn"
  std::string region_style = "masked-image"; // or "region-prompt"
  bool detection_info = true;
  int path_samples = 20;
  double half_width_m = 1.0;
  double cutoff_margin_m = 3.0;
  double target_dist_m = 10.0;
  double max_angle_deg = 45.0;
};

pipeline::PipelineConfig pipeline_config_from(const ModeOptions& mode,
                                              const std::string& model_id);

struct GenerateOptions {
  std::string manifest;
  std::string out_dir;
  ModeOptions mode;
  CommonOptions common;
  BackendSettings backend;
  bool debug_artifacts = false;
};

int cmd_generate(const GenerateOptions& options,
                 std::shared_ptr<gateway::ChatBackend> backend_override = nullptr,
                 std::ostream& log = std::cout);

struct PredictOptions {
  std::string bench;
  std::string manifest;
  std::string out_dir;
  ModeOptions mode;
  CommonOptions common;
  BackendSettings backend;
};

int cmd_predict(const PredictOptions& options,
                std::shared_ptr<gateway::ChatBackend> backend_override = nullptr,
                std::ostream& log = std::cout);

struct EvaluateOptions {
  std::string predictions;
  std::string bench;
  std::string out_dir;
  std::string label = "model";
  bool metrics_only = false;
  std::string judge_model;
  std::string embedding_base_url;  // enables the embedding-F1 column
  CommonOptions common;
  BackendSettings judge_backend;
};

int cmd_evaluate(const EvaluateOptions& options,
                 std::shared_ptr<gateway::ChatBackend> judge_override = nullptr,
                 std::ostream& log = std::cout);

struct AbCompareOptions {
  std::string bench;
  std::string manifest;
  std::string out_dir;
  ModeOptions mode_a;
  ModeOptions mode_b;
  bool metrics_only = true;  // judging both arms is opt-in
  std::string judge_model;
  CommonOptions common;
  BackendSettings backend;
  BackendSettings judge_backend;
};

int cmd_ab_compare(const AbCompareOptions& options,
                   std::shared_ptr<gateway::ChatBackend> backend_a = nullptr,
                   std::shared_ptr<gateway::ChatBackend> backend_b = nullptr,
                   std::shared_ptr<gateway::ChatBackend> judge_override = nullptr,
                   std::ostream& log = std::cout);

struct ReportOptions {
  std::vector<std::string> report_files;
  std::string format = "table";  // or "csv"
};

int cmd_report(const ReportOptions& options, std::ostream& log = std::cout);

}  // namespace walkguide::cli
