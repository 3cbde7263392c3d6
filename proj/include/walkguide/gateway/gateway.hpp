#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <mutex>
#include <semaphore>

#include "walkguide/gateway/chat.hpp"

namespace walkguide::gateway {

struct GatewayOptions {
  std::filesystem::path cache_dir;  // empty disables the disk cache
  int max_attempts = 3;
  double backoff_initial_s = 0.5;
  double backoff_factor = 2.0;
  int max_in_flight = 4;
};

// Wraps a backend with a content-addressed disk cache, retry with exponential
// backoff, an in-flight bound, and wall-clock latency capture. Safe to share
// across worker threads.
class ChatGateway {
 public:
  ChatGateway(std::shared_ptr<ChatBackend> backend, GatewayOptions options);

  ChatResponse complete(const ChatRequest& request);

  long backend_calls() const { return backend_calls_.load(); }
  const std::string& backend_id() const { return backend_id_; }

 private:
  bool try_cache(const std::string& key, ChatResponse& out);
  void store_cache(const std::string& key, const ChatResponse& response);

  std::shared_ptr<ChatBackend> backend_;
  GatewayOptions options_;
  std::string backend_id_;
  std::mutex cache_mutex_;
  std::counting_semaphore<> in_flight_;
  std::atomic<long> backend_calls_{0};
};

}  // namespace walkguide::gateway
