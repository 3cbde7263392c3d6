#include "walkguide/geom/mask.hpp"

#include <algorithm>
#include <cmath>

#include "walkguide/util/error.hpp"

namespace walkguide::geom {

namespace {

PixelPoint clamp_point(PixelPoint p, int w, int h) {
  return {std::clamp(p.x, 0.0, double(w - 1)), std::clamp(p.y, 0.0, double(h - 1))};
}

}  // namespace

RegionPolygons build_region_polygons(const std::vector<PathSample>& polyline,
                                     const std::vector<PixelPoint>& left_points,
                                     const std::vector<PixelPoint>& right_points, int image_width,
                                     int image_height) {
  if (polyline.size() < 2) throw Error("degenerate-path", "need at least 2 path samples");
  if (left_points.size() != polyline.size() || right_points.size() != polyline.size())
    throw Error("degenerate-path", "offset point lists must match polyline length");

  const int w = image_width;
  const int h = image_height;
  RegionPolygons polys;

  polys.left.points.push_back({0, 0});
  polys.left.points.push_back({0, double(h - 1)});
  for (const auto& p : left_points) polys.left.points.push_back(clamp_point(p, w, h));

  polys.right.points.push_back({double(w - 1), 0});
  polys.right.points.push_back({double(w - 1), double(h - 1)});
  for (const auto& p : right_points) polys.right.points.push_back(clamp_point(p, w, h));

  for (const auto& p : left_points) polys.path.points.push_back(clamp_point(p, w, h));
  for (auto it = right_points.rbegin(); it != right_points.rend(); ++it)
    polys.path.points.push_back(clamp_point(*it, w, h));

  return polys;
}

void fill_polygon(Mask& mask, const Polygon& polygon) {
  const auto& pts = polygon.points;
  const size_t n = pts.size();
  if (n < 3) return;

  for (int y = 0; y < mask.height; ++y) {
    const double yd = y;
    std::vector<double> crossings;
    std::vector<std::pair<double, double>> horizontal;
    for (size_t i = 0; i < n; ++i) {
      const PixelPoint& a = pts[i];
      const PixelPoint& b = pts[(i + 1) % n];
      if (a.y == b.y) {
        if (a.y == yd) horizontal.push_back({std::min(a.x, b.x), std::max(a.x, b.x)});
        continue;
      }
      double ymin = std::min(a.y, b.y);
      double ymax = std::max(a.y, b.y);
      // Half-open rule so shared vertices are not double counted.
      if (yd >= ymin && yd < ymax) {
        double t = (yd - a.y) / (b.y - a.y);
        crossings.push_back(a.x + t * (b.x - a.x));
      }
    }
    std::sort(crossings.begin(), crossings.end());

    auto paint = [&](double x0, double x1) {
      int lo = std::max(0, int(std::ceil(x0 - 1e-9)));
      int hi = std::min(mask.width - 1, int(std::floor(x1 + 1e-9)));
      for (int x = lo; x <= hi; ++x) mask.set(x, y, 1);
    };
    for (size_t i = 0; i + 1 < crossings.size(); i += 2) paint(crossings[i], crossings[i + 1]);
    for (auto [x0, x1] : horizontal) paint(x0, x1);
  }
}

RegionMaskSet rasterize_masks(const RegionPolygons& polygons, int image_width, int image_height) {
  RegionMaskSet masks;
  masks.path = Mask(image_width, image_height);
  masks.left = Mask(image_width, image_height);
  masks.right = Mask(image_width, image_height);

  fill_polygon(masks.path, polygons.path);
  fill_polygon(masks.left, polygons.left);
  fill_polygon(masks.right, polygons.right);

  // Boundary pixels tie-break to path; left wins over right on any residual
  // overlap so the set stays pairwise disjoint.
  for (size_t i = 0; i < masks.path.data.size(); ++i) {
    if (masks.path.data[i]) {
      masks.left.data[i] = 0;
      masks.right.data[i] = 0;
    } else if (masks.left.data[i]) {
      masks.right.data[i] = 0;
    }
  }
  return masks;
}

RegionMaskSet rasterize_masks(const RegionPolygons& polygons, int image_width, int image_height,
                              const DepthMap& depth, double cutoff_depth_m) {
  RegionMaskSet masks = rasterize_masks(polygons, image_width, image_height);
  apply_background_cutoff(masks, depth, cutoff_depth_m, 0.0);
  return masks;
}

double background_cutoff_depth(double goal_depth_m, double margin_m) {
  return goal_depth_m + margin_m;
}

void apply_background_cutoff(RegionMaskSet& masks, const DepthMap& depth, double goal_depth_m,
                             double margin_m) {
  if (goal_depth_m <= 0) throw Error("invalid-depth", "goal depth must be positive");
  if (depth.width != masks.path.width || depth.height != masks.path.height)
    throw Error("dimension-mismatch", "depth and mask dimensions differ");
  const double cutoff = background_cutoff_depth(goal_depth_m, margin_m);
  for (size_t i = 0; i < depth.values.size(); ++i) {
    float z = depth.values[i];
    if (!DepthMap::is_valid(z) || z > cutoff) {
      masks.left.data[i] = 0;
      masks.right.data[i] = 0;
      masks.path.data[i] = 0;
    }
  }
}

image::ImageBuffer mask_image(const image::ImageBuffer& img, const Mask& mask,
                              std::array<uint8_t, 3> fill) {
  if (img.width != mask.width || img.height != mask.height)
    throw Error("dimension-mismatch", "image and mask dimensions differ");
  image::ImageBuffer out = img;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      if (mask.at(x, y)) continue;
      for (int c = 0; c < img.channels; ++c) out.set(x, y, c, fill[std::min(c, 2)]);
    }
  }
  return out;
}

double region_overlap(const std::array<double, 4>& bbox_norm, const Mask& mask) {
  const double x1 = bbox_norm[0], y1 = bbox_norm[1], x2 = bbox_norm[2], y2 = bbox_norm[3];
  if (!(x1 < x2) || !(y1 < y2)) throw Error("degenerate-bbox", "bbox must have positive area");

  // Pixel i spans [i, i+1) in units of 1/size.
  int x_lo = std::clamp(int(std::floor(x1 * mask.width)), 0, mask.width - 1);
  int x_hi = std::clamp(int(std::ceil(x2 * mask.width)) - 1, 0, mask.width - 1);
  int y_lo = std::clamp(int(std::floor(y1 * mask.height)), 0, mask.height - 1);
  int y_hi = std::clamp(int(std::ceil(y2 * mask.height)) - 1, 0, mask.height - 1);
  if (x_lo > x_hi || y_lo > y_hi) throw Error("degenerate-bbox", "bbox covers no pixels");

  long total = 0;
  long covered = 0;
  for (int y = y_lo; y <= y_hi; ++y) {
    for (int x = x_lo; x <= x_hi; ++x) {
      ++total;
      covered += mask.at(x, y) != 0;
    }
  }
  return double(covered) / double(total);
}

}  // namespace walkguide::geom
