#include "walkguide/gateway/gateway.hpp"

#include <chrono>
#include <thread>

#include <json.hpp>

#include "walkguide/util/error.hpp"
#include "walkguide/util/fsio.hpp"

namespace walkguide::gateway {

using nlohmann::json;
namespace fs = std::filesystem;

ChatGateway::ChatGateway(std::shared_ptr<ChatBackend> backend, GatewayOptions options)
    : backend_(std::move(backend)),
      options_(std::move(options)),
      backend_id_(backend_->id()),
      in_flight_(std::max(1, options_.max_in_flight)) {
  if (!options_.cache_dir.empty()) util::ensure_dir(options_.cache_dir);
}

bool ChatGateway::try_cache(const std::string& key, ChatResponse& out) {
  if (options_.cache_dir.empty()) return false;
  std::lock_guard<std::mutex> lock(cache_mutex_);
  fs::path file = options_.cache_dir / (key + ".json");
  if (!fs::exists(file)) return false;
  json j = json::parse(util::read_file(file));
  out.text = j.at("text").get<std::string>();
  out.latency_s = j.value("latency_s", 0.0);
  out.prompt_tokens = j.value("prompt_tokens", -1);
  out.completion_tokens = j.value("completion_tokens", -1);
  out.backend_id = j.value("backend_id", backend_id_);
  out.cache_hit = true;
  return true;
}

void ChatGateway::store_cache(const std::string& key, const ChatResponse& response) {
  if (options_.cache_dir.empty()) return;
  std::lock_guard<std::mutex> lock(cache_mutex_);
  json j;
  j["text"] = response.text;
  j["latency_s"] = response.latency_s;
  j["prompt_tokens"] = response.prompt_tokens;
  j["completion_tokens"] = response.completion_tokens;
  j["backend_id"] = response.backend_id;
  util::write_file_atomic(options_.cache_dir / (key + ".json"), j.dump());
}

ChatResponse ChatGateway::complete(const ChatRequest& request) {
  if (request.user_turns.empty())
    throw Error("invalid-request", "chat request needs at least one user turn");

  const std::string key = cache_key(request);
  ChatResponse response;
  if (try_cache(key, response)) return response;

  std::string last_code = "backend-unavailable";
  double backoff = options_.backoff_initial_s;
  for (int attempt = 0; attempt < std::max(1, options_.max_attempts); ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
      backoff *= options_.backoff_factor;
    }
    in_flight_.acquire();
    auto t0 = std::chrono::steady_clock::now();
    try {
      backend_calls_.fetch_add(1);
      BackendResult result = backend_->complete(request);
      auto t1 = std::chrono::steady_clock::now();
      in_flight_.release();
      response.text = result.text;
      response.latency_s = std::chrono::duration<double>(t1 - t0).count();
      response.prompt_tokens = result.prompt_tokens;
      response.completion_tokens = result.completion_tokens;
      response.backend_id = backend_id_;
      response.cache_hit = false;
      store_cache(key, response);
      return response;
    } catch (const Error& e) {
      in_flight_.release();
      if (e.code() == "request-rejected") throw;
      last_code = e.code();
    }
  }
  if (last_code == "timeout") throw Error("timeout", "backend timed out after retries");
  throw Error("backend-unavailable", "retries exhausted (" + last_code + ")");
}

}  // namespace walkguide::gateway
