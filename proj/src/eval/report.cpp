#include "walkguide/eval/report.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "walkguide/eval/metrics.hpp"
#include "walkguide/pipeline/describe.hpp"
#include "walkguide/util/error.hpp"
#include "walkguide/util/jsonl.hpp"

namespace walkguide::eval {

using nlohmann::json;

json prediction_to_json(const Prediction& p) {
  json j;
  j["scene_id"] = p.scene_id;
  j["dest"] = p.texts.dest;
  j["left"] = p.texts.left;
  j["right"] = p.texts.right;
  j["path"] = p.texts.path;
  j["desc"] = p.texts.desc;
  j["reco"] = p.texts.reco;
  j["latencies_s"] = p.texts.latencies_s;
  return j;
}

Prediction prediction_from_json(const json& j) {
  Prediction p;
  p.scene_id = j.at("scene_id").get<std::string>();
  p.texts.dest = j.value("dest", "");
  p.texts.left = j.value("left", "");
  p.texts.right = j.value("right", "");
  p.texts.path = j.value("path", "");
  p.texts.desc = j.value("desc", "");
  p.texts.reco = j.value("reco", "");
  if (j.contains("latencies_s")) {
    auto lat = j["latencies_s"];
    for (size_t i = 0; i < 6 && i < lat.size(); ++i) p.texts.latencies_s[i] = lat[i].get<double>();
  }
  return p;
}

std::vector<Prediction> load_predictions(const std::filesystem::path& path) {
  std::vector<Prediction> out;
  for (const auto& line : util::read_jsonl(path)) out.push_back(prediction_from_json(line.value));
  return out;
}

void write_predictions(const std::filesystem::path& path, const std::vector<Prediction>& preds) {
  std::vector<json> rows;
  for (const auto& p : preds) rows.push_back(prediction_to_json(p));
  util::write_jsonl(path, rows);
}

json EvalReport::to_json() const {
  json j;
  j["label"] = label;
  for (size_t c = 0; c < kCategories.size(); ++c) {
    j["categories"][kCategories[c]] = {{"mean", categories[c].mean},
                                       {"present", categories[c].present},
                                       {"missing", categories[c].missing}};
  }
  j["overall_avg"] = overall_avg;
  j["mean_word_count"] = mean_word_count;
  j["mean_latency_s"] = mean_latency_s;
  j["go_stop_accuracy"] = go_stop_accuracy;
  j["rouge_l_mean"] = rouge_l_mean;
  j["meteor_mean"] = meteor_mean;
  if (embedding_f1_mean) j["embedding_f1_mean"] = *embedding_f1_mean;
  j["judge_model"] = judge_model;
  j["scenes"] = scenes;
  j["judged"] = judged;
  j["missing_ratings"] = missing_ratings;
  j["metrics_only"] = metrics_only;
  return j;
}

EvalReport EvalReport::from_json(const json& j) {
  EvalReport r;
  r.label = j.value("label", "");
  for (size_t c = 0; c < kCategories.size(); ++c) {
    if (j.contains("categories") && j["categories"].contains(kCategories[c])) {
      const auto& cj = j["categories"][kCategories[c]];
      r.categories[c] = {cj.value("mean", 0.0), cj.value("present", 0), cj.value("missing", 0)};
    }
  }
  r.overall_avg = j.value("overall_avg", 0.0);
  r.mean_word_count = j.value("mean_word_count", 0.0);
  r.mean_latency_s = j.value("mean_latency_s", 0.0);
  r.go_stop_accuracy = j.value("go_stop_accuracy", 0.0);
  r.rouge_l_mean = j.value("rouge_l_mean", 0.0);
  r.meteor_mean = j.value("meteor_mean", 0.0);
  if (j.contains("embedding_f1_mean")) r.embedding_f1_mean = j["embedding_f1_mean"].get<double>();
  r.judge_model = j.value("judge_model", "");
  r.scenes = j.value("scenes", 0);
  r.judged = j.value("judged", 0);
  r.missing_ratings = j.value("missing_ratings", 0);
  r.metrics_only = j.value("metrics_only", false);
  return r;
}

double go_stop_accuracy(const std::vector<std::pair<std::string, std::string>>& scene_reco,
                        const std::vector<scene::BenchRecord>& bench) {
  std::map<std::string, const scene::BenchRecord*> by_id;
  for (const auto& rec : bench) by_id[rec.scene_id] = &rec;
  if (scene_reco.empty()) return 0.0;
  int correct = 0;
  for (const auto& [scene_id, reco_text] : scene_reco) {
    auto it = by_id.find(scene_id);
    if (it == by_id.end()) throw Error("unmatched-scene", "no bench record for " + scene_id);
    pipeline::RecoLabel label = pipeline::parse_reco_label(reco_text);
    bool match = (label == pipeline::RecoLabel::Go && it->second->passable == scene::Passable::Go) ||
                 (label == pipeline::RecoLabel::Stop && it->second->passable == scene::Passable::Stop);
    correct += match;
  }
  return double(correct) / double(scene_reco.size());
}

namespace {

const std::string& category_text(const scene::DescriptionSet& d, size_t category) {
  switch (category) {
    case 0: return d.dest;
    case 1: return d.left;
    case 2: return d.right;
    case 3: return d.path;
    default: return d.reco;
  }
}

const std::string& category_text(const scene::BenchRecord& r, size_t category) {
  switch (category) {
    case 0: return r.dest_text;
    case 1: return r.left_text;
    case 2: return r.right_text;
    case 3: return r.path_text;
    default: return r.reco_text;
  }
}

}  // namespace

EvalReport evaluate_run(const std::vector<Prediction>& predictions,
                        const std::vector<scene::BenchRecord>& bench,
                        gateway::ChatGateway* judge_gateway, const EvalConfig& config) {
  std::map<std::string, const scene::BenchRecord*> by_id;
  for (const auto& rec : bench) by_id[rec.scene_id] = &rec;
  // All scenes must match before any judge call is spent.
  for (const auto& p : predictions) {
    if (!by_id.count(p.scene_id))
      throw Error("unmatched-scene", "no bench record for " + p.scene_id);
  }
  if (!config.metrics_only && !judge_gateway)
    throw Error("invalid-request", "judging requires a judge gateway");

  EvalReport report;
  report.metrics_only = config.metrics_only;
  report.scenes = int(predictions.size());
  if (!config.metrics_only)
    report.judge_model =
        config.judge.model_id.empty() ? judge_gateway->backend_id() : config.judge.model_id;

  const size_t n = predictions.size();
  // ratings[scene][category]: -1 missing, 0 not judged
  std::vector<std::array<int, 5>> ratings(n, {0, 0, 0, 0, 0});

  if (!config.metrics_only && n > 0) {
    std::atomic<size_t> next{0};
    auto judge_worker = [&] {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= n) return;
        const auto& pred = predictions[i];
        const auto& ref = *by_id.at(pred.scene_id);
        for (size_t c = 0; c < kCategories.size(); ++c) {
          if (category_text(pred.texts, c).empty() || category_text(ref, c).empty()) {
            ratings[i][c] = -1;  // nothing to grade
            continue;
          }
          auto verdict = judge_description(category_text(ref, c), category_text(pred.texts, c),
                                           *judge_gateway, config.judge);
          ratings[i][c] = verdict.rating ? *verdict.rating : -1;
        }
      }
    };
    int workers = std::max(1, std::min<int>(config.workers, int(n)));
    if (workers == 1) {
      judge_worker();
    } else {
      std::exception_ptr failure;
      std::mutex failure_mutex;
      std::vector<std::thread> pool;
      for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
          try {
            judge_worker();
          } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next.store(n);  // stop handing out work
          }
        });
      }
      for (auto& t : pool) t.join();
      if (failure) std::rethrow_exception(failure);
    }
  }

  // Deterministic single-threaded fold.
  double word_sum = 0;
  long word_texts = 0;
  double latency_sum = 0;
  double rouge_sum = 0;
  double meteor_sum = 0;
  double embedding_sum = 0;
  long metric_pairs = 0;
  std::array<long, 5> rating_sum{};
  for (size_t i = 0; i < n; ++i) {
    const auto& pred = predictions[i];
    const auto& ref = *by_id.at(pred.scene_id);
    latency_sum += pred.texts.total_latency_s();
    for (size_t c = 0; c < kCategories.size(); ++c) {
      word_sum += word_count(category_text(pred.texts, c));
      ++word_texts;
      rouge_sum += rouge_l(category_text(pred.texts, c), category_text(ref, c));
      meteor_sum += meteor_lite(category_text(pred.texts, c), category_text(ref, c));
      if (config.embed) {
        auto cand_tokens = tokenize(category_text(pred.texts, c));
        auto ref_tokens = tokenize(category_text(ref, c));
        if (!cand_tokens.empty() && !ref_tokens.empty()) {
          std::vector<std::string> batch = cand_tokens;
          batch.insert(batch.end(), ref_tokens.begin(), ref_tokens.end());
          auto vectors = config.embed(batch);
          std::vector<std::vector<double>> cand_vecs(vectors.begin(),
                                                     vectors.begin() + cand_tokens.size());
          std::vector<std::vector<double>> ref_vecs(vectors.begin() + cand_tokens.size(),
                                                    vectors.end());
          embedding_sum += greedy_embedding_f1(cand_vecs, ref_vecs);
        }
      }
      ++metric_pairs;
      if (config.metrics_only) continue;
      if (ratings[i][c] > 0) {
        rating_sum[c] += ratings[i][c];
        ++report.categories[c].present;
      } else {
        ++report.categories[c].missing;
      }
      ++report.judged;
    }
  }

  double category_mean_sum = 0;
  for (size_t c = 0; c < kCategories.size(); ++c) {
    auto& cat = report.categories[c];
    cat.mean = cat.present > 0 ? double(rating_sum[c]) / cat.present : 0.0;
    category_mean_sum += cat.mean;
    report.missing_ratings += cat.missing;
  }
  report.overall_avg = config.metrics_only ? 0.0 : category_mean_sum / double(kCategories.size());
  report.mean_word_count = word_texts > 0 ? word_sum / word_texts : 0.0;
  report.mean_latency_s = n > 0 ? latency_sum / double(n) : 0.0;
  report.rouge_l_mean = metric_pairs > 0 ? rouge_sum / metric_pairs : 0.0;
  report.meteor_mean = metric_pairs > 0 ? meteor_sum / metric_pairs : 0.0;
  if (config.embed && metric_pairs > 0) report.embedding_f1_mean = embedding_sum / metric_pairs;

  std::vector<std::pair<std::string, std::string>> scene_reco;
  for (const auto& p : predictions) scene_reco.emplace_back(p.scene_id, p.texts.reco);
  report.go_stop_accuracy = go_stop_accuracy(scene_reco, bench);

  return report;
}

namespace {

std::string fixed2(double v) {
  if (v > -0.005 && v <= 0.0) v = 0.0;  // avoid "-0.00"
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string render_report(const std::vector<EvalReport>& rows, ReportFormat format) {
  std::vector<EvalReport> sorted = rows;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const EvalReport& a, const EvalReport& b) { return a.label < b.label; });

  bool any_embedding = false;
  for (const auto& r : sorted) any_embedding |= r.embedding_f1_mean.has_value();

  std::vector<std::string> header = {"Model",   "Dest",  "Left",    "Right",  "Path",
                                     "Reco",    "Avg",   "# Words", "Inf. Time", "Go/Stop",
                                     "ROUGE-L", "METEOR"};
  if (any_embedding) header.push_back("Emb-F1");
  header.push_back("Judged");
  header.push_back("Missing");

  std::vector<std::vector<std::string>> table;
  table.push_back(header);
  for (const auto& r : sorted) {
    std::vector<std::string> row;
    row.push_back(r.label.empty() ? "(unnamed)" : r.label);
    for (const auto& cat : r.categories) row.push_back(fixed2(cat.mean));
    row.push_back(fixed2(r.overall_avg));
    row.push_back(fixed2(r.mean_word_count));
    row.push_back(fixed2(r.mean_latency_s));
    row.push_back(fixed2(r.go_stop_accuracy));
    row.push_back(fixed2(r.rouge_l_mean));
    row.push_back(fixed2(r.meteor_mean));
    if (any_embedding)
      row.push_back(r.embedding_f1_mean ? fixed2(*r.embedding_f1_mean) : "-");
    row.push_back(std::to_string(r.judged));
    row.push_back(std::to_string(r.missing_ratings));
    table.push_back(row);
  }

  std::ostringstream out;
  if (format == ReportFormat::Delimited) {
    for (const auto& row : table) {
      for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
      out << "\n";
    }
    return out.str();
  }

  std::vector<size_t> widths(header.size(), 0);
  for (const auto& row : table)
    for (size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
  for (size_t r = 0; r < table.size(); ++r) {
    for (size_t i = 0; i < table[r].size(); ++i) {
      if (i) out << "  ";
      out << table[r][i] << std::string(widths[i] - table[r][i].size(), ' ');
    }
    out << "\n";
    if (r == 0) {
      size_t total = 0;
      for (size_t wi = 0; wi < widths.size(); ++wi) total += widths[wi] + (wi ? 2 : 0);
      out << std::string(total, '-') << "\n";
    }
  }
  return out.str();
}

}  // namespace walkguide::eval
