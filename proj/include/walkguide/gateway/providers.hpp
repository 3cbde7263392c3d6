#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "walkguide/geom/types.hpp"
#include "walkguide/image/image.hpp"
#include "walkguide/scene/types.hpp"

namespace walkguide::gateway {

struct HttpEndpoint {
  std::string base_url;
  std::string path;
  std::string api_token;
  double timeout_s = 120.0;
};

// Depth acquisition for scenes without a depth entry in the manifest: a
// sidecar file next to the image ("<stem>.f32" or "<stem>.pfm") bypasses the
// network; otherwise the configured endpoint is queried with the image bytes.
class DepthService {
 public:
  explicit DepthService(std::optional<HttpEndpoint> endpoint = std::nullopt);

  static std::optional<std::filesystem::path> sidecar_for(const std::filesystem::path& image_path);

  // Throws "no-depth-provider" when neither a sidecar nor an endpoint exists;
  // validates that the result matches the image dimensions.
  geom::DepthMap depth_for(const std::filesystem::path& image_path,
                           const image::ImageBuffer& img) const;

 private:
  std::optional<HttpEndpoint> endpoint_;
};

// Detector results: "<stem>.det.json" sidecar or endpoint POST. Labels outside
// the vocabulary map to "other:<label>".
class DetectService {
 public:
  explicit DetectService(std::optional<HttpEndpoint> endpoint = std::nullopt);

  static std::optional<std::filesystem::path> sidecar_for(const std::filesystem::path& image_path);

  std::vector<scene::DetectedObject> detect_for(const std::filesystem::path& image_path,
                                                const image::ImageBuffer& img,
                                                std::vector<std::string>* warnings = nullptr) const;

 private:
  std::optional<HttpEndpoint> endpoint_;
};

// OpenAI-compatible embeddings endpoint: POST {"input": [...]} and read the
// vectors back in request order.
class EmbeddingClient {
 public:
  explicit EmbeddingClient(HttpEndpoint endpoint);
  std::vector<std::vector<double>> embed(const std::vector<std::string>& inputs) const;

 private:
  HttpEndpoint endpoint_;
};

}  // namespace walkguide::gateway
