#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "walkguide/geom/types.hpp"

namespace walkguide::image {

// 8-bit raster, 1 (gray) or 3 (RGB) channels, row-major interleaved.
struct ImageBuffer {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<uint8_t> pixels;

  ImageBuffer() = default;
  ImageBuffer(int w, int h, int c)
      : width(w), height(h), channels(c), pixels(size_t(w) * h * c, 0) {}

  uint8_t at(int x, int y, int c) const {
    return pixels[(size_t(y) * width + x) * channels + c];
  }
  void set(int x, int y, int c, uint8_t v) {
    pixels[(size_t(y) * width + x) * channels + c] = v;
  }
};

// Binary PPM (P6) / PGM (P5), maxval 255.
ImageBuffer read_image(const std::filesystem::path& path);
std::vector<uint8_t> encode_pnm(const ImageBuffer& img);
void write_pnm(const std::filesystem::path& path, const ImageBuffer& img);

// Minimal PNG encoder (8-bit gray or RGB, zlib stored blocks). Good enough for
// masks and debug overlays without pulling in a compression library.
std::vector<uint8_t> encode_png(const ImageBuffer& img);
void write_png(const std::filesystem::path& path, const ImageBuffer& img);

// Mask export as 8-bit single-channel PNG with values 0/255.
void write_mask_png(const std::filesystem::path& path, const geom::Mask& mask);

// Depth files: ".pfm" (single-channel float PFM) or raw little-endian float32
// row-major with a "<file>.dims" sidecar holding "width height".
geom::DepthMap read_depth(const std::filesystem::path& path);
void write_depth_raw(const std::filesystem::path& path, const geom::DepthMap& depth);
geom::DepthMap parse_depth_json(const std::string& body);  // {"width","height","values"}

std::string base64_encode(const std::vector<uint8_t>& bytes);

}  // namespace walkguide::image
