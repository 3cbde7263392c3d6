#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>

#include "testutil.hpp"
#include "walkguide/util/error.hpp"

using namespace walkguide;
using namespace testutil;

namespace {

uint32_t be32(const uint8_t* p) {
  return (uint32_t(p[0]) << 24) | (uint32_t(p[1]) << 16) | (uint32_t(p[2]) << 8) | p[3];
}

// Minimal reader for the stored-deflate PNGs this project writes; enough to
// verify the export contract without a PNG library.
struct ParsedPng {
  uint32_t width = 0, height = 0;
  int bit_depth = 0, color_type = 0;
  std::vector<uint8_t> raw;  // filter byte + scanline, per row
};

ParsedPng parse_png(const std::vector<uint8_t>& bytes) {
  ParsedPng png;
  REQUIRE(bytes.size() > 8);
  const uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  REQUIRE(std::memcmp(bytes.data(), sig, 8) == 0);
  size_t pos = 8;
  std::vector<uint8_t> idat;
  while (pos + 8 <= bytes.size()) {
    uint32_t len = be32(&bytes[pos]);
    std::string type(bytes.begin() + pos + 4, bytes.begin() + pos + 8);
    const uint8_t* data = &bytes[pos + 8];
    if (type == "IHDR") {
      png.width = be32(data);
      png.height = be32(data + 4);
      png.bit_depth = data[8];
      png.color_type = data[9];
    } else if (type == "IDAT") {
      idat.insert(idat.end(), data, data + len);
    }
    pos += 12 + len;  // len + type + data + crc
  }
  REQUIRE(idat.size() > 2);
  size_t i = 2;  // zlib header
  for (;;) {
    REQUIRE(i < idat.size());
    uint8_t header = idat[i++];
    REQUIRE((header & 0x06) == 0);  // stored blocks only
    uint16_t len = uint16_t(idat[i] | (idat[i + 1] << 8));
    i += 4;  // len + ~len
    png.raw.insert(png.raw.end(), idat.begin() + i, idat.begin() + i + len);
    i += len;
    if (header & 1) break;
  }
  return png;
}

}  // namespace

TEST_CASE("mask PNG export is an 8-bit grayscale 0/255 raster") {
  geom::Mask mask(5, 3);
  mask.set(0, 0, 1);
  mask.set(4, 2, 1);
  mask.set(2, 1, 1);
  auto dir = make_temp_dir("png");
  image::write_mask_png(dir / "mask.png", mask);

  auto png = parse_png(util::read_file_bytes(dir / "mask.png"));
  CHECK(png.width == 5);
  CHECK(png.height == 3);
  CHECK(png.bit_depth == 8);
  CHECK(png.color_type == 0);  // grayscale
  REQUIRE(png.raw.size() == size_t(3) * (1 + 5));
  for (int y = 0; y < 3; ++y) {
    CHECK(png.raw[size_t(y) * 6] == 0);  // filter none
    for (int x = 0; x < 5; ++x)
      CHECK(png.raw[size_t(y) * 6 + 1 + x] == (mask.at(x, y) ? 255 : 0));
  }
}

TEST_CASE("RGB PNG export carries the pixel bytes") {
  auto img = gradient_image(4, 2);
  auto png = parse_png(image::encode_png(img));
  CHECK(png.width == 4);
  CHECK(png.color_type == 2);
  REQUIRE(png.raw.size() == size_t(2) * (1 + 4 * 3));
  CHECK(png.raw[1] == img.at(0, 0, 0));
  CHECK(png.raw[2] == img.at(0, 0, 1));
}

TEST_CASE("PNM round-trip") {
  auto img = gradient_image(7, 5);
  auto dir = make_temp_dir("pnm");
  image::write_pnm(dir / "img.ppm", img);
  auto back = image::read_image(dir / "img.ppm");
  CHECK(back.width == 7);
  CHECK(back.height == 5);
  CHECK(back.channels == 3);
  CHECK(back.pixels == img.pixels);

  image::ImageBuffer gray(4, 4, 1);
  gray.set(1, 2, 0, 99);
  image::write_pnm(dir / "img.pgm", gray);
  auto gray_back = image::read_image(dir / "img.pgm");
  CHECK(gray_back.channels == 1);
  CHECK(gray_back.at(1, 2, 0) == 99);
}

TEST_CASE("raw depth round-trip with dims sidecar") {
  auto dir = make_temp_dir("rawdepth");
  auto depth = ramp_depth(6, 4, 1.0f, 9.0f);
  image::write_depth_raw(dir / "d.f32", depth);
  auto back = image::read_depth(dir / "d.f32");
  CHECK(back.width == 6);
  CHECK(back.height == 4);
  CHECK(back.values == depth.values);

  SUBCASE("missing sidecar is rejected") {
    std::filesystem::remove(dir / "d.f32.dims");
    CHECK_THROWS_AS(image::read_depth(dir / "d.f32"), Error);
  }
  SUBCASE("size mismatch is rejected") {
    util::write_file_atomic(dir / "d.f32.dims", "7 4\n");
    CHECK_THROWS_AS(image::read_depth(dir / "d.f32"), Error);
  }
}

TEST_CASE("PFM depth files parse with bottom-to-top row order") {
  // 3x2 little-endian PFM, rows stored bottom first
  auto dir = make_temp_dir("pfm");
  std::string header = "Pf\n3 2\n-1.0\n";
  float bottom_row[3] = {1.0f, 2.0f, 3.0f};
  float top_row[3] = {4.0f, 5.0f, 6.0f};
  std::vector<uint8_t> bytes(header.begin(), header.end());
  auto push_row = [&](const float* row) {
    const uint8_t* p = reinterpret_cast<const uint8_t*>(row);
    bytes.insert(bytes.end(), p, p + 3 * sizeof(float));
  };
  push_row(bottom_row);
  push_row(top_row);
  util::write_file_atomic(dir / "d.pfm", bytes);

  auto depth = image::read_depth(dir / "d.pfm");
  CHECK(depth.width == 3);
  CHECK(depth.height == 2);
  CHECK(depth.at(0, 0) == 4.0f);  // top row in image coordinates
  CHECK(depth.at(2, 0) == 6.0f);
  CHECK(depth.at(0, 1) == 1.0f);
  CHECK(depth.at(2, 1) == 3.0f);
}

TEST_CASE("depth JSON payloads validate their dimensions") {
  CHECK(image::parse_depth_json("{\"width\":2,\"height\":2,\"values\":[1,2,3,4]}").at(1, 1) ==
        4.0f);
  CHECK_THROWS_AS(image::parse_depth_json("{\"width\":3,\"height\":2,\"values\":[1,2,3,4]}"),
                  Error);
}

TEST_CASE("malformed images are rejected with clear errors") {
  auto dir = make_temp_dir("badimg");
  util::write_file_atomic(dir / "bad.ppm", std::string("P3\n2 2\n255\n"));
  CHECK_THROWS_AS(image::read_image(dir / "bad.ppm"), Error);
  util::write_file_atomic(dir / "trunc.ppm", std::string("P6\n4 4\n255\nxx"));
  CHECK_THROWS_AS(image::read_image(dir / "trunc.ppm"), Error);
}
