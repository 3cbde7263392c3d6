#include "walkguide/eval/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "walkguide/util/text.hpp"

namespace walkguide::eval {

std::vector<std::string> tokenize(std::string_view text) {
  auto tokens = util::split_ws(text);
  for (auto& t : tokens) t = util::to_lower(t);
  return tokens;
}

size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double rouge_l(std::string_view candidate, std::string_view reference) {
  auto cand = tokenize(candidate);
  auto ref = tokenize(reference);
  if (cand.empty() || ref.empty()) return 0.0;
  size_t lcs = lcs_length(cand, ref);
  if (lcs == 0) return 0.0;
  double p = double(lcs) / cand.size();
  double r = double(lcs) / ref.size();
  return 2.0 * p * r / (p + r);
}

std::string stem(std::string_view token) {
  std::string t(token);
  for (const char* suffix : {"ing", "ed", "es", "s"}) {
    size_t n = std::string_view(suffix).size();
    if (t.size() > n + 2 && t.compare(t.size() - n, n, suffix) == 0)
      return t.substr(0, t.size() - n);
  }
  return t;
}

double meteor_lite(std::string_view candidate, std::string_view reference) {
  auto cand = tokenize(candidate);
  auto ref = tokenize(reference);
  if (cand.empty() || ref.empty()) return 0.0;

  // mapping[i] = index into ref matched by cand[i], or -1
  std::vector<int> mapping(cand.size(), -1);
  std::vector<bool> ref_used(ref.size(), false);

  auto align = [&](auto&& key) {
    for (size_t i = 0; i < cand.size(); ++i) {
      if (mapping[i] >= 0) continue;
      for (size_t j = 0; j < ref.size(); ++j) {
        if (ref_used[j]) continue;
        if (key(cand[i]) == key(ref[j])) {
          mapping[i] = int(j);
          ref_used[j] = true;
          break;
        }
      }
    }
  };
  align([](const std::string& s) { return s; });
  align([](const std::string& s) { return stem(s); });

  int matches = 0;
  for (int m : mapping) matches += m >= 0;
  if (matches == 0) return 0.0;

  // Chunks: maximal runs that are contiguous in both strings.
  int chunks = 0;
  int prev_ref = -2;
  bool in_chunk = false;
  for (size_t i = 0; i < cand.size(); ++i) {
    if (mapping[i] < 0) {
      in_chunk = false;
      continue;
    }
    if (!in_chunk || mapping[i] != prev_ref + 1) ++chunks;
    in_chunk = true;
    prev_ref = mapping[i];
  }

  double p = double(matches) / cand.size();
  double r = double(matches) / ref.size();
  double f_mean = 10.0 * p * r / (r + 9.0 * p);
  double penalty = 0.5 * std::pow(double(chunks) / matches, 3.0);
  return f_mean * (1.0 - penalty);
}

int word_count(std::string_view text) { return int(util::split_ws(text).size()); }

namespace {

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0, na = 0, nb = 0;
  size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na <= 0 || nb <= 0) return 0.0;
  return dot / std::sqrt(na * nb);
}

}  // namespace

double greedy_embedding_f1(const std::vector<std::vector<double>>& candidate_vectors,
                           const std::vector<std::vector<double>>& reference_vectors) {
  if (candidate_vectors.empty() || reference_vectors.empty()) return 0.0;
  auto directed = [](const std::vector<std::vector<double>>& from,
                     const std::vector<std::vector<double>>& to) {
    double sum = 0;
    for (const auto& v : from) {
      double best = -1.0;
      for (const auto& w : to) best = std::max(best, cosine(v, w));
      sum += best;
    }
    return sum / double(from.size());
  };
  double p = directed(candidate_vectors, reference_vectors);
  double r = directed(reference_vectors, candidate_vectors);
  if (p + r <= 0) return 0.0;
  return 2.0 * p * r / (p + r);
}

}  // namespace walkguide::eval
