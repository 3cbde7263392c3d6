#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "walkguide/eval/judge.hpp"
#include "walkguide/scene/types.hpp"

namespace walkguide::eval {

// One model output row: the six generated texts plus per-call latencies.
struct Prediction {
  std::string scene_id;
  scene::DescriptionSet texts;
};

std::vector<Prediction> load_predictions(const std::filesystem::path& path);
void write_predictions(const std::filesystem::path& path, const std::vector<Prediction>& preds);
nlohmann::json prediction_to_json(const Prediction& p);
Prediction prediction_from_json(const nlohmann::json& j);

struct CategoryStats {
  double mean = 0;   // over present ratings only
  int present = 0;
  int missing = 0;
};

// The five judged categories in report column order.
constexpr std::array<const char*, 5> kCategories = {"dest", "left", "right", "path", "reco"};

struct EvalReport {
  std::string label;  // model / run identifier
  std::array<CategoryStats, 5> categories{};
  double overall_avg = 0;       // arithmetic mean of the five category means
  double mean_word_count = 0;   // over all five generated texts
  double mean_latency_s = 0;    // per-scene total
  double go_stop_accuracy = 0;
  double rouge_l_mean = 0;
  double meteor_mean = 0;
  std::optional<double> embedding_f1_mean;
  std::string judge_model;
  int scenes = 0;
  int judged = 0;           // rating-present + rating-missing
  int missing_ratings = 0;
  bool metrics_only = false;

  nlohmann::json to_json() const;
  static EvalReport from_json(const nlohmann::json& j);
};

struct EvalConfig {
  bool metrics_only = false;
  JudgeOptions judge;
  int workers = 1;
  // Token-embedding provider for the optional embedding-F1 column; the column
  // is omitted when unset.
  std::function<std::vector<std::vector<double>>(const std::vector<std::string>&)> embed;
};

// Fraction of scenes whose predicted recommendation label matches the
// reference go/stop label; unknown predictions count as wrong. Throws on a
// prediction without a matching bench record.
double go_stop_accuracy(const std::vector<std::pair<std::string, std::string>>& scene_reco,
                        const std::vector<scene::BenchRecord>& bench);

// Judges the five categories per scene against the references and aggregates
// the Table-style row. Every prediction must match a bench record before any
// judging starts.
EvalReport evaluate_run(const std::vector<Prediction>& predictions,
                        const std::vector<scene::BenchRecord>& bench,
                        gateway::ChatGateway* judge_gateway, const EvalConfig& config);

enum class ReportFormat { Table, Delimited };

// Column order: Dest, Left, Right, Path, Reco, Avg, #Words, Inf.Time, then
// accuracy and text-metric columns; scores rounded to 2 decimals; rows sorted
// by label.
std::string render_report(const std::vector<EvalReport>& rows, ReportFormat format);

}  // namespace walkguide::eval
