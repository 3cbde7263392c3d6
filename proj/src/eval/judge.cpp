#include "walkguide/eval/judge.hpp"

#include <cctype>

#include "walkguide/prompts/prompts.hpp"
#include "walkguide/util/error.hpp"

namespace walkguide::eval {

std::optional<int> parse_rating(std::string_view text) {
  std::optional<int> rating;
  size_t pos = 0;
  while ((pos = text.find("[[", pos)) != std::string_view::npos) {
    size_t end = text.find("]]", pos + 2);
    if (end == std::string_view::npos) break;
    std::string_view inner = text.substr(pos + 2, end - pos - 2);
    bool digits = !inner.empty() && inner.size() <= 2;
    for (char c : inner)
      if (!std::isdigit(static_cast<unsigned char>(c))) digits = false;
    if (digits) {
      int value = std::stoi(std::string(inner));
      if (value >= 1 && value <= 10) rating = value;
    }
    pos += 2;
  }
  return rating;
}

JudgeVerdict judge_description(const std::string& reference, const std::string& assistant,
                               gateway::ChatGateway& gateway, const JudgeOptions& options) {
  if (reference.empty() || assistant.empty())
    throw Error("invalid-request", "judge needs both reference and assistant texts");

  auto [system_text, user_text] = prompts::render_judge_prompts(reference, assistant);

  JudgeVerdict verdict;
  verdict.judge_model = options.model_id.empty() ? gateway.backend_id() : options.model_id;

  for (int attempt = 0; attempt <= options.extra_attempts; ++attempt) {
    gateway::ChatRequest req;
    req.system_text = system_text;
    req.user_turns.push_back({user_text, std::nullopt});
    req.model_id = options.model_id;
    req.max_tokens = options.max_tokens;
    if (attempt > 0) req.cache_salt = "judge-retry-" + std::to_string(attempt);

    auto response = gateway.complete(req);
    ++verdict.attempts;
    verdict.latency_s += response.latency_s;
    verdict.explanation = response.text;
    verdict.rating = parse_rating(response.text);
    if (verdict.rating) break;
  }
  return verdict;
}

}  // namespace walkguide::eval
