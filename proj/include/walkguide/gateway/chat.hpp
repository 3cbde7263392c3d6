#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace walkguide::gateway {

struct ImageAttachment {
  std::string media_type;  // "image/png", "image/x-portable-pixmap", ...
  std::vector<uint8_t> bytes;
};

struct ChatTurn {
  std::string text;
  std::optional<ImageAttachment> image;  // at most one image per turn
};

struct ChatRequest {
  std::string system_text;
  std::vector<ChatTurn> user_turns;
  std::string model_id;
  double temperature = 0.0;  // deterministic by default
  int max_tokens = 512;
  std::string cache_salt;  // varies the cache key without changing the prompt
};

struct ChatResponse {
  std::string text;
  double latency_s = 0;
  int prompt_tokens = -1;
  int completion_tokens = -1;
  std::string backend_id;
  bool cache_hit = false;
};

struct BackendResult {
  std::string text;
  int prompt_tokens = -1;
  int completion_tokens = -1;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual BackendResult complete(const ChatRequest& request) = 0;
  virtual std::string id() const = 0;
};

// Digest over image bytes, full prompt text, model id, and decoding params.
std::string cache_key(const ChatRequest& request);

// Scripted in-process backend for tests, dry runs, and offline demos.
class StubChatBackend : public ChatBackend {
 public:
  using Handler = std::function<std::string(const ChatRequest&, int call_index)>;

  explicit StubChatBackend(Handler handler, std::string id = "stub");

  // Fixed response for every call.
  static std::shared_ptr<StubChatBackend> fixed(std::string text);
  // Heuristic responses keyed on prompt content; produces plausible demo data.
  static std::shared_ptr<StubChatBackend> demo();

  BackendResult complete(const ChatRequest& request) override;
  std::string id() const override { return id_; }

  // Failure script: entry i controls call i ("ok", "transport", "http-500",
  // "timeout"). Calls beyond the script succeed.
  void set_failure_script(std::vector<std::string> outcomes);
  void set_delay_s(double delay) { delay_s_ = delay; }

  int call_count() const { return call_count_.load(); }
  int max_concurrent() const { return max_concurrent_.load(); }
  std::vector<ChatRequest> calls() const;

 private:
  Handler handler_;
  std::string id_;
  std::vector<std::string> failure_script_;
  double delay_s_ = 0;
  std::atomic<int> call_count_{0};
  std::atomic<int> in_flight_{0};
  std::atomic<int> max_concurrent_{0};
  mutable std::mutex mutex_;
  std::vector<ChatRequest> log_;
};

struct HttpBackendConfig {
  std::string base_url;                      // e.g. "http://localhost:8000"
  std::string path = "/v1/chat/completions";
  std::string api_token;                     // sent as a bearer token when non-empty
  std::string model_id;
  double timeout_s = 120.0;
};

// OpenAI-compatible chat-completions client; images travel as base64 data URLs.
class HttpChatBackend : public ChatBackend {
 public:
  explicit HttpChatBackend(HttpBackendConfig config);
  BackendResult complete(const ChatRequest& request) override;
  std::string id() const override;

  // Request body serialization, exposed for wire-format tests.
  static std::string request_body(const ChatRequest& request);

 private:
  HttpBackendConfig config_;
};

}  // namespace walkguide::gateway
