#include "walkguide/gateway/providers.hpp"

#include <httplib.h>
#include <json.hpp>

#include "walkguide/scene/vocabulary.hpp"
#include "walkguide/util/error.hpp"
#include "walkguide/util/fsio.hpp"

namespace walkguide::gateway {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string post_image(const HttpEndpoint& ep, const image::ImageBuffer& img) {
  httplib::Client client(ep.base_url);
  client.set_connection_timeout(std::chrono::duration<double>(ep.timeout_s));
  client.set_read_timeout(std::chrono::duration<double>(ep.timeout_s));
  httplib::Headers headers;
  if (!ep.api_token.empty()) headers.emplace("Authorization", "Bearer " + ep.api_token);
  auto bytes = image::encode_png(img);
  auto res = client.Post(ep.path, headers,
                         std::string(reinterpret_cast<const char*>(bytes.data()), bytes.size()),
                         "image/png");
  if (!res) throw Error("transport", "no response from " + ep.base_url + ep.path);
  if (res->status >= 400)
    throw Error("request-rejected", "status " + std::to_string(res->status) + ": " + res->body);
  return res->body;
}

}  // namespace

DepthService::DepthService(std::optional<HttpEndpoint> endpoint) : endpoint_(std::move(endpoint)) {}

std::optional<fs::path> DepthService::sidecar_for(const fs::path& image_path) {
  fs::path raw = image_path;
  raw.replace_extension(".f32");
  if (fs::exists(raw)) return raw;
  fs::path pfm = image_path;
  pfm.replace_extension(".pfm");
  if (fs::exists(pfm)) return pfm;
  return std::nullopt;
}

geom::DepthMap DepthService::depth_for(const fs::path& image_path,
                                       const image::ImageBuffer& img) const {
  geom::DepthMap depth;
  if (auto sidecar = sidecar_for(image_path)) {
    depth = image::read_depth(*sidecar);
  } else if (endpoint_) {
    depth = image::parse_depth_json(post_image(*endpoint_, img));
  } else {
    throw Error("no-depth-provider",
                "no depth sidecar for " + image_path.string() + " and no endpoint configured");
  }
  if (depth.width != img.width || depth.height != img.height)
    throw Error("dimension-mismatch", "depth dims do not match image dims for " +
                                          image_path.string());
  return depth;
}

DetectService::DetectService(std::optional<HttpEndpoint> endpoint)
    : endpoint_(std::move(endpoint)) {}

std::optional<fs::path> DetectService::sidecar_for(const fs::path& image_path) {
  fs::path det = image_path;
  det.replace_extension(".det.json");
  if (fs::exists(det)) return det;
  return std::nullopt;
}

std::vector<scene::DetectedObject> DetectService::detect_for(
    const fs::path& image_path, const image::ImageBuffer& img,
    std::vector<std::string>* warnings) const {
  json payload;
  if (auto sidecar = sidecar_for(image_path)) {
    payload = json::parse(util::read_file(*sidecar));
  } else if (endpoint_) {
    payload = json::parse(post_image(*endpoint_, img));
  } else {
    throw Error("no-detect-provider",
                "no detections sidecar for " + image_path.string() + " and no endpoint");
  }
  if (!payload.is_array()) throw Error("malformed-record", "detections payload must be an array");
  std::vector<scene::DetectedObject> out;
  for (const auto& item : payload) {
    scene::DetectedObject obj;
    std::string raw = item.at("label").get<std::string>();
    obj.label = scene::canonical_label(raw);
    if (obj.label.rfind("other:", 0) == 0 && warnings)
      warnings->push_back("label outside vocabulary: " + raw);
    auto bbox = item.at("bbox");
    for (int i = 0; i < 4; ++i) obj.bbox[i] = bbox.at(i).get<double>();
    obj.score = item.value("score", 1.0);
    out.push_back(std::move(obj));
  }
  return out;
}

EmbeddingClient::EmbeddingClient(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {
  if (endpoint_.path.empty()) endpoint_.path = "/v1/embeddings";
}

std::vector<std::vector<double>> EmbeddingClient::embed(
    const std::vector<std::string>& inputs) const {
  if (inputs.empty()) return {};
  httplib::Client client(endpoint_.base_url);
  client.set_connection_timeout(std::chrono::duration<double>(endpoint_.timeout_s));
  client.set_read_timeout(std::chrono::duration<double>(endpoint_.timeout_s));
  httplib::Headers headers;
  if (!endpoint_.api_token.empty())
    headers.emplace("Authorization", "Bearer " + endpoint_.api_token);
  json body;
  body["input"] = inputs;
  auto res = client.Post(endpoint_.path, headers, body.dump(), "application/json");
  if (!res) throw Error("transport", "no response from " + endpoint_.base_url + endpoint_.path);
  if (res->status >= 400)
    throw Error("request-rejected", "status " + std::to_string(res->status) + ": " + res->body);
  json payload = json::parse(res->body);
  std::vector<std::vector<double>> out;
  for (const auto& item : payload.at("data"))
    out.push_back(item.at("embedding").get<std::vector<double>>());
  if (out.size() != inputs.size())
    throw Error("malformed-record", "embedding count does not match input count");
  return out;
}

}  // namespace walkguide::gateway
