#pragma once

#include <optional>
#include <string>

#include "walkguide/gateway/gateway.hpp"

namespace walkguide::eval {

struct JudgeVerdict {
  std::string explanation;          // raw judge text
  std::optional<int> rating;        // 1..10 when parseable
  std::string judge_model;
  double latency_s = 0;
  int attempts = 0;
};

// Last occurrence of the "[[n]]" pattern with n in 1..10; out-of-range values
// are ignored.
std::optional<int> parse_rating(std::string_view text);

struct JudgeOptions {
  std::string model_id;
  int max_tokens = 1024;
  int extra_attempts = 2;  // retries when the rating cannot be parsed
};

// Renders the judge prompts, queries the backend, and parses the rating.
// Unparseable ratings are retried (with a varied cache salt so retries reach
// the backend); after the retries the verdict comes back without a rating.
JudgeVerdict judge_description(const std::string& reference, const std::string& assistant,
                               gateway::ChatGateway& gateway, const JudgeOptions& options = {});

}  // namespace walkguide::eval
