#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace walkguide::geom {

// Pinhole intrinsics plus mount height of the capture camera.
struct CameraModel {
  double fx_px = 0;
  double fy_px = 0;
  double cx_px = 0;
  double cy_px = 0;
  double height_m = 0.8;
};

// Metric depth aligned 1:1 with the paired image. Values <= 0 or non-finite
// mark invalid pixels; they are never treated as a real distance.
struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<float> values;  // row-major, meters

  static bool is_valid(float z) { return std::isfinite(z) && z > 0.0f; }

  bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }

  float at(int x, int y) const { return values[size_t(y) * width + x]; }

  bool valid_at(int x, int y) const { return in_bounds(x, y) && is_valid(at(x, y)); }

  // Nearest-pixel lookup with coordinates clamped into the image.
  float at_nearest(double x, double y) const {
    int xi = std::clamp(int(std::lround(x)), 0, width - 1);
    int yi = std::clamp(int(std::lround(y)), 0, height - 1);
    return at(xi, yi);
  }

  bool any_valid() const {
    for (float z : values)
      if (is_valid(z)) return true;
    return false;
  }
};

struct PixelPoint {
  double x = 0;
  double y = 0;
};

// Destination in normalized image coordinates (top-left origin) with its
// estimated metric distance from the start point.
struct GoalPoint {
  double x_norm = 0;
  double y_norm = 0;
  double depth_m = 0;
};

struct PathSample {
  PixelPoint point;
  double depth_m = 0;  // filled from the nearest valid sample when the pixel itself is invalid
};

struct Polygon {
  std::vector<PixelPoint> points;
};

struct RegionPolygons {
  Polygon left;
  Polygon right;
  Polygon path;
};

// Binary raster, one byte per pixel (0 or 1).
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> data;

  Mask() = default;
  Mask(int w, int h) : width(w), height(h), data(size_t(w) * h, 0) {}

  uint8_t at(int x, int y) const { return data[size_t(y) * width + x]; }
  void set(int x, int y, uint8_t v) { data[size_t(y) * width + x] = v; }

  size_t count() const {
    size_t n = 0;
    for (uint8_t v : data) n += v != 0;
    return n;
  }
};

struct RegionMaskSet {
  Mask left;
  Mask right;
  Mask path;
};

struct PathGeometry {
  PixelPoint start;
  GoalPoint goal;
  std::vector<PathSample> polyline;       // ordered bottom of image -> goal
  std::vector<PixelPoint> left_points;    // same length as polyline
  std::vector<PixelPoint> right_points;
  RegionPolygons polygons;
  double cutoff_depth_m = 0;
};

// Normalized <-> pixel mapping. Normalized (0,0) is the top-left pixel center
// and (1,1) the bottom-right pixel center.
inline PixelPoint norm_to_px(double x_norm, double y_norm, int width, int height) {
  return {x_norm * (width - 1), y_norm * (height - 1)};
}

inline double px_to_norm_x(double x, int width) { return width > 1 ? x / (width - 1) : 0.0; }
inline double px_to_norm_y(double y, int height) { return height > 1 ? y / (height - 1) : 0.0; }

}  // namespace walkguide::geom
