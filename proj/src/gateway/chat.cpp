#include "walkguide/gateway/chat.hpp"

#include <chrono>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "walkguide/image/image.hpp"
#include "walkguide/util/error.hpp"
#include "walkguide/util/sha256.hpp"

namespace walkguide::gateway {

using nlohmann::json;

std::string cache_key(const ChatRequest& request) {
  json canon;
  canon["model"] = request.model_id;
  canon["temperature"] = request.temperature;
  canon["max_tokens"] = request.max_tokens;
  canon["salt"] = request.cache_salt;
  canon["system"] = request.system_text;
  json turns = json::array();
  for (const auto& turn : request.user_turns) {
    json t;
    t["text"] = turn.text;
    if (turn.image) {
      util::Sha256 h;
      h.update(turn.image->bytes.data(), turn.image->bytes.size());
      t["image"] = h.hex_digest();
      t["media"] = turn.image->media_type;
    }
    turns.push_back(t);
  }
  canon["turns"] = turns;
  return util::sha256_hex(canon.dump());
}

// ---- StubChatBackend ----

StubChatBackend::StubChatBackend(Handler handler, std::string id)
    : handler_(std::move(handler)), id_(std::move(id)) {}

std::shared_ptr<StubChatBackend> StubChatBackend::fixed(std::string text) {
  return std::make_shared<StubChatBackend>(
      [text = std::move(text)](const ChatRequest&, int) { return text; }, "stub-fixed");
}

std::shared_ptr<StubChatBackend> StubChatBackend::demo() {
  auto handler = [](const ChatRequest& req, int) -> std::string {
    const std::string& user = req.user_turns.empty() ? std::string() : req.user_turns[0].text;
    auto contains = [&user](const char* needle) { return user.find(needle) != std::string::npos; };
    if (contains("impartial judge") || req.system_text.find("impartial judge") != std::string::npos)
      return "The descriptions agree on the essentials. Rating: [[7]]";
    // the single-turn prompt embeds the recommendation wording, so match it first
    if (contains("numbered sections"))
      return "1. The destination is ahead on the sidewalk.\n"
             "2. There are nothing than the floor on the left side.\n"
             "3. There are bollards on the right side.\n"
             "4. There are nothing on the path.\n"
             "5. The user is on a sidewalk.\n"
             "6. Follow the path. The path is clear of obstacles, so walking to the destination "
             "is possible.";
    if (contains("select the most appropriate action"))
      return "Follow the path. The path is clear of obstacles, so walking to the destination is "
             "possible.";
    if (contains("destination is the point")) return "The destination is ahead on the sidewalk.";
    if (contains("left of the path")) return "There are nothing than the floor on the left side.";
    if (contains("right of the path")) return "There are bollards on the right side.";
    if (contains("objects are on the path")) return "There are nothing on the path.";
    if (contains("where the user is located")) return "The user is on a sidewalk.";
    return "There are nothing than the floor.";
  };
  return std::make_shared<StubChatBackend>(handler, "stub-demo");
}

BackendResult StubChatBackend::complete(const ChatRequest& request) {
  int index = call_count_.fetch_add(1);
  int now = in_flight_.fetch_add(1) + 1;
  int prev_max = max_concurrent_.load();
  while (now > prev_max && !max_concurrent_.compare_exchange_weak(prev_max, now)) {
  }
  {
    std::lock_guard<std::mutex> lock(mutex_);
    log_.push_back(request);
  }
  if (delay_s_ > 0)
    std::this_thread::sleep_for(std::chrono::duration<double>(delay_s_));
  in_flight_.fetch_sub(1);

  if (index < int(failure_script_.size())) {
    const std::string& outcome = failure_script_[index];
    if (outcome == "transport") throw Error("transport", "injected transport failure");
    if (outcome == "http-500") throw Error("http-5xx", "injected server failure");
    if (outcome == "http-400") throw Error("request-rejected", "injected client failure");
    if (outcome == "timeout") throw Error("timeout", "injected timeout");
  }
  BackendResult result;
  result.text = handler_(request, index);
  result.prompt_tokens = int(request.system_text.size() / 4);
  result.completion_tokens = int(result.text.size() / 4);
  return result;
}

void StubChatBackend::set_failure_script(std::vector<std::string> outcomes) {
  failure_script_ = std::move(outcomes);
}

std::vector<ChatRequest> StubChatBackend::calls() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return log_;
}

// ---- HttpChatBackend ----

HttpChatBackend::HttpChatBackend(HttpBackendConfig config) : config_(std::move(config)) {}

std::string HttpChatBackend::id() const {
  return config_.model_id.empty() ? config_.base_url : config_.model_id;
}

std::string HttpChatBackend::request_body(const ChatRequest& request) {
  json body;
  body["model"] = request.model_id;
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_tokens;
  json messages = json::array();
  if (!request.system_text.empty())
    messages.push_back({{"role", "system"}, {"content", request.system_text}});
  for (const auto& turn : request.user_turns) {
    json content = json::array();
    content.push_back({{"type", "text"}, {"text", turn.text}});
    if (turn.image) {
      std::string url = "data:" + turn.image->media_type + ";base64," +
                        image::base64_encode(turn.image->bytes);
      content.push_back({{"type", "image_url"}, {"image_url", {{"url", url}}}});
    }
    messages.push_back({{"role", "user"}, {"content", content}});
  }
  body["messages"] = messages;
  return body.dump();
}

BackendResult HttpChatBackend::complete(const ChatRequest& request) {
  ChatRequest req = request;
  if (req.model_id.empty()) req.model_id = config_.model_id;

  httplib::Client client(config_.base_url);
  client.set_connection_timeout(std::chrono::duration<double>(config_.timeout_s));
  client.set_read_timeout(std::chrono::duration<double>(config_.timeout_s));
  httplib::Headers headers;
  if (!config_.api_token.empty())
    headers.emplace("Authorization", "Bearer " + config_.api_token);

  auto res = client.Post(config_.path, headers, request_body(req), "application/json");
  if (!res) {
    auto err = res.error();
    if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
        err == httplib::Error::Write)
      throw Error("timeout", "no response from " + config_.base_url);
    throw Error("transport", httplib::to_string(err));
  }
  if (res->status >= 500)
    throw Error("http-5xx", "status " + std::to_string(res->status) + ": " + res->body);
  if (res->status >= 400)
    throw Error("request-rejected", "status " + std::to_string(res->status) + ": " + res->body);

  try {
    json j = json::parse(res->body);
    BackendResult result;
    result.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
    if (j.contains("usage")) {
      result.prompt_tokens = j["usage"].value("prompt_tokens", -1);
      result.completion_tokens = j["usage"].value("completion_tokens", -1);
    }
    return result;
  } catch (const json::exception& e) {
    throw Error("transport", std::string("unparseable completion payload: ") + e.what());
  }
}

}  // namespace walkguide::gateway
