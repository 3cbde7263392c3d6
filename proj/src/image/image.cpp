#include "walkguide/image/image.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "walkguide/util/error.hpp"
#include "walkguide/util/fsio.hpp"

namespace walkguide::image {

namespace fs = std::filesystem;

namespace {

// Skips PNM whitespace and '#' comments.
void skip_pnm_space(std::istream& in) {
  for (;;) {
    int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

int read_pnm_int(std::istream& in) {
  skip_pnm_space(in);
  int v = -1;
  in >> v;
  if (!in || v < 0) throw Error("malformed-image", "bad PNM header field");
  return v;
}

}  // namespace

ImageBuffer read_image(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("unreadable-file", "cannot open image " + path.string());
  char magic[2] = {0, 0};
  in.read(magic, 2);
  int channels;
  if (magic[0] == 'P' && magic[1] == '6') {
    channels = 3;
  } else if (magic[0] == 'P' && magic[1] == '5') {
    channels = 1;
  } else {
    throw Error("malformed-image", path.string() + ": expected binary PPM/PGM");
  }
  int w = read_pnm_int(in);
  int h = read_pnm_int(in);
  int maxval = read_pnm_int(in);
  if (maxval != 255) throw Error("malformed-image", path.string() + ": maxval must be 255");
  in.get();  // single whitespace after header
  ImageBuffer img(w, h, channels);
  in.read(reinterpret_cast<char*>(img.pixels.data()),
          static_cast<std::streamsize>(img.pixels.size()));
  if (!in) throw Error("malformed-image", path.string() + ": truncated pixel data");
  return img;
}

std::vector<uint8_t> encode_pnm(const ImageBuffer& img) {
  std::ostringstream head;
  head << (img.channels == 3 ? "P6" : "P5") << "\n"
       << img.width << " " << img.height << "\n255\n";
  std::string h = head.str();
  std::vector<uint8_t> out(h.begin(), h.end());
  out.insert(out.end(), img.pixels.begin(), img.pixels.end());
  return out;
}

void write_pnm(const fs::path& path, const ImageBuffer& img) {
  util::write_file_atomic(path, encode_pnm(img));
}

// ---- PNG ----

namespace {

uint32_t crc32_update(uint32_t crc, const uint8_t* data, size_t len) {
  static uint32_t table[256];
  static bool init = false;
  if (!init) {
    for (uint32_t n = 0; n < 256; ++n) {
      uint32_t c = n;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
      table[n] = c;
    }
    init = true;
  }
  crc ^= 0xffffffffu;
  for (size_t i = 0; i < len; ++i) crc = table[(crc ^ data[i]) & 0xff] ^ (crc >> 8);
  return crc ^ 0xffffffffu;
}

void push_be32(std::vector<uint8_t>& v, uint32_t x) {
  v.push_back(uint8_t(x >> 24));
  v.push_back(uint8_t(x >> 16));
  v.push_back(uint8_t(x >> 8));
  v.push_back(uint8_t(x));
}

void push_chunk(std::vector<uint8_t>& out, const char type[4], const std::vector<uint8_t>& body) {
  push_be32(out, uint32_t(body.size()));
  size_t crc_start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), body.begin(), body.end());
  uint32_t crc = crc32_update(0, out.data() + crc_start, out.size() - crc_start);
  push_be32(out, crc);
}

// zlib stream with uncompressed deflate blocks.
std::vector<uint8_t> zlib_store(const std::vector<uint8_t>& raw) {
  std::vector<uint8_t> out;
  out.push_back(0x78);
  out.push_back(0x01);
  size_t pos = 0;
  do {
    size_t n = std::min<size_t>(raw.size() - pos, 65535);
    bool last = pos + n == raw.size();
    out.push_back(last ? 1 : 0);
    out.push_back(uint8_t(n & 0xff));
    out.push_back(uint8_t(n >> 8));
    out.push_back(uint8_t(~n & 0xff));
    out.push_back(uint8_t((~n >> 8) & 0xff));
    out.insert(out.end(), raw.begin() + pos, raw.begin() + pos + n);
    pos += n;
  } while (pos < raw.size());
  // adler32
  uint32_t a = 1, b = 0;
  for (uint8_t c : raw) {
    a = (a + c) % 65521;
    b = (b + a) % 65521;
  }
  push_be32(out, (b << 16) | a);
  return out;
}

}  // namespace

std::vector<uint8_t> encode_png(const ImageBuffer& img) {
  if (img.channels != 1 && img.channels != 3)
    throw Error("malformed-image", "PNG encoder supports 1 or 3 channels");
  std::vector<uint8_t> out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

  std::vector<uint8_t> ihdr;
  push_be32(ihdr, uint32_t(img.width));
  push_be32(ihdr, uint32_t(img.height));
  ihdr.push_back(8);                                // bit depth
  ihdr.push_back(img.channels == 3 ? 2 : 0);        // color type
  ihdr.push_back(0);
  ihdr.push_back(0);
  ihdr.push_back(0);
  push_chunk(out, "IHDR", ihdr);

  std::vector<uint8_t> raw;
  raw.reserve((size_t(img.width) * img.channels + 1) * img.height);
  for (int y = 0; y < img.height; ++y) {
    raw.push_back(0);  // filter: none
    const uint8_t* row = img.pixels.data() + size_t(y) * img.width * img.channels;
    raw.insert(raw.end(), row, row + size_t(img.width) * img.channels);
  }
  push_chunk(out, "IDAT", zlib_store(raw));
  push_chunk(out, "IEND", {});
  return out;
}

void write_png(const fs::path& path, const ImageBuffer& img) {
  util::write_file_atomic(path, encode_png(img));
}

void write_mask_png(const fs::path& path, const geom::Mask& mask) {
  ImageBuffer img(mask.width, mask.height, 1);
  for (size_t i = 0; i < mask.data.size(); ++i) img.pixels[i] = mask.data[i] ? 255 : 0;
  write_png(path, img);
}

// ---- depth ----

namespace {

geom::DepthMap read_pfm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("unreadable-file", "cannot open depth " + path.string());
  std::string magic;
  in >> magic;
  if (magic != "Pf") throw Error("malformed-depth", path.string() + ": expected grayscale PFM");
  int w = 0, h = 0;
  double scale = 0;
  in >> w >> h >> scale;
  in.get();
  if (w <= 0 || h <= 0 || scale == 0)
    throw Error("malformed-depth", path.string() + ": bad PFM header");
  geom::DepthMap depth;
  depth.width = w;
  depth.height = h;
  depth.values.resize(size_t(w) * h);
  // PFM stores rows bottom-to-top; negative scale means little-endian.
  std::vector<float> row(w);
  for (int y = h - 1; y >= 0; --y) {
    in.read(reinterpret_cast<char*>(row.data()), std::streamsize(sizeof(float) * w));
    if (!in) throw Error("malformed-depth", path.string() + ": truncated PFM");
    if (scale > 0) {
      for (float& v : row) {
        uint32_t bits;
        std::memcpy(&bits, &v, 4);
        bits = __builtin_bswap32(bits);
        std::memcpy(&v, &bits, 4);
      }
    }
    std::copy(row.begin(), row.end(), depth.values.begin() + size_t(y) * w);
  }
  return depth;
}

geom::DepthMap read_raw_depth(const fs::path& path) {
  fs::path dims_path = path;
  dims_path += ".dims";
  std::ifstream dims(dims_path);
  if (!dims)
    throw Error("malformed-depth", "missing dims sidecar " + dims_path.string());
  int w = 0, h = 0;
  dims >> w >> h;
  if (w <= 0 || h <= 0) throw Error("malformed-depth", dims_path.string() + ": bad dims");
  auto bytes = util::read_file_bytes(path);
  if (bytes.size() != size_t(w) * h * sizeof(float))
    throw Error("malformed-depth", path.string() + ": size does not match dims sidecar");
  geom::DepthMap depth;
  depth.width = w;
  depth.height = h;
  depth.values.resize(size_t(w) * h);
  std::memcpy(depth.values.data(), bytes.data(), bytes.size());
  return depth;
}

}  // namespace

geom::DepthMap read_depth(const fs::path& path) {
  if (path.extension() == ".pfm") return read_pfm(path);
  return read_raw_depth(path);
}

void write_depth_raw(const fs::path& path, const geom::DepthMap& depth) {
  std::vector<uint8_t> bytes(depth.values.size() * sizeof(float));
  std::memcpy(bytes.data(), depth.values.data(), bytes.size());
  util::write_file_atomic(path, bytes);
  fs::path dims_path = path;
  dims_path += ".dims";
  util::write_file_atomic(dims_path,
                          std::to_string(depth.width) + " " + std::to_string(depth.height) + "\n");
}

geom::DepthMap parse_depth_json(const std::string& body) {
  nlohmann::json j = nlohmann::json::parse(body);
  geom::DepthMap depth;
  depth.width = j.at("width").get<int>();
  depth.height = j.at("height").get<int>();
  depth.values = j.at("values").get<std::vector<float>>();
  if (depth.width <= 0 || depth.height <= 0 ||
      depth.values.size() != size_t(depth.width) * depth.height)
    throw Error("malformed-depth", "depth payload dims do not match value count");
  return depth;
}

std::string base64_encode(const std::vector<uint8_t>& bytes) {
  static const char* tbl = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out.push_back(tbl[(v >> 18) & 63]);
    out.push_back(tbl[(v >> 12) & 63]);
    out.push_back(tbl[(v >> 6) & 63]);
    out.push_back(tbl[v & 63]);
  }
  if (i + 1 == bytes.size()) {
    uint32_t v = bytes[i] << 16;
    out.push_back(tbl[(v >> 18) & 63]);
    out.push_back(tbl[(v >> 12) & 63]);
    out += "==";
  } else if (i + 2 == bytes.size()) {
    uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out.push_back(tbl[(v >> 18) & 63]);
    out.push_back(tbl[(v >> 12) & 63]);
    out.push_back(tbl[(v >> 6) & 63]);
    out += "=";
  }
  return out;
}

}  // namespace walkguide::image
