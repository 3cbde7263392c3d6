#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "walkguide/gateway/gateway.hpp"
#include "walkguide/pipeline/describe.hpp"
#include "walkguide/scene/types.hpp"

namespace walkguide::pipeline {

struct RunOptions {
  uint64_t seed = 0;
  int workers = 1;
  int limit = -1;  // <0 processes every scene
  bool strict = false;
  bool dry_run = false;
  bool debug_artifacts = false;  // masks and masked images under <out>/debug
};

struct SceneOutcome {
  std::string scene_id;
  bool ok = false;
  bool resumed = false;
  std::string error;
  double latency_s = 0;
};

struct RunSummary {
  int total = 0;
  int succeeded = 0;
  int failed = 0;
  int resumed = 0;
  bool dry_run = false;
  double mean_latency_s = 0;
  long backend_calls = 0;
  std::string generated_at;  // wall-clock provenance lives here, not in samples
  std::vector<SceneOutcome> outcomes;

  nlohmann::json to_json() const;
};

// Stable per-scene seed so any scene reproduces in isolation.
uint64_t scene_seed(uint64_t run_seed, std::string_view scene_id);

// Batch driver: per-scene goal sampling, description, sample emission.
// Outputs one record per scene under <out>/samples plus an aggregate
// <out>/dataset.jsonl and <out>/run_summary.json. Scenes whose sample file
// already exists are skipped (resume). Per-scene failures abort the batch only
// in strict mode.
RunSummary run_generation(const std::vector<scene::SceneBundle>& scenes,
                          const PipelineConfig& config, const RunOptions& options,
                          gateway::ChatGateway& gateway, const std::filesystem::path& out_dir);

}  // namespace walkguide::pipeline
