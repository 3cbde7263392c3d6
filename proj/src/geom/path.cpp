#include "walkguide/geom/path.hpp"

#include <cmath>
#include <random>

#include "walkguide/geom/mask.hpp"
#include "walkguide/util/error.hpp"

namespace walkguide::geom {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Uniform [0,1) from the top 53 bits; avoids the implementation-defined
// behavior of std::uniform_real_distribution so fixed seeds reproduce
// everywhere.
double uniform01(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

}  // namespace

GoalPoint sample_goal_point(const DepthMap& depth, const CameraModel& camera, uint64_t rng_seed,
                            const GoalParams& params) {
  if (depth.width <= 1 || depth.height <= 1)
    throw Error("no-valid-depth", "depth map too small");
  if (params.target_dist_m <= 0 || params.max_angle_deg <= 0)
    throw Error("invalid-params", "goal sampling params must be positive");
  if (!depth.any_valid()) throw Error("no-valid-depth", "depth map has no valid pixel");

  std::mt19937_64 rng(rng_seed);
  double angle_deg = (2.0 * uniform01(rng) - 1.0) * params.max_angle_deg;
  double angle = angle_deg * kPi / 180.0;

  const int w = depth.width;
  const int h = depth.height;
  PixelPoint start{(w - 1) / 2.0, double(h - 1)};
  double dx = std::sin(angle);
  double dy = -std::cos(angle);

  for (int t = 0;; ++t) {
    double x = start.x + t * dx;
    double y = start.y + t * dy;
    int xi = int(std::lround(x));
    int yi = int(std::lround(y));
    if (!depth.in_bounds(xi, yi)) break;
    float z = depth.at(xi, yi);
    if (DepthMap::is_valid(z) && z >= params.target_dist_m)
      return {px_to_norm_x(x, w), px_to_norm_y(y, h), double(z)};
  }

  // Flat-ground fallback: project the ground point target_dist_m ahead at the
  // camera's mount height.
  double d = params.target_dist_m;
  double zc = d * std::cos(angle);
  double xc = d * std::sin(angle);
  double u = camera.cx_px + camera.fx_px * xc / zc;
  double v = camera.cy_px + camera.fy_px * camera.height_m / zc;
  u = std::clamp(u, 0.0, double(w - 1));
  v = std::clamp(v, 0.0, double(h - 1));
  return {px_to_norm_x(u, w), px_to_norm_y(v, h), d};
}

std::vector<PathSample> build_path_polyline(PixelPoint start, PixelPoint goal_px,
                                            const DepthMap& depth, int n_samples) {
  if (n_samples < 2) throw Error("degenerate-path", "need at least 2 samples");
  if (goal_px.y < 0) throw Error("degenerate-path", "goal above image top");
  if (start.x == goal_px.x && start.y == goal_px.y)
    throw Error("degenerate-path", "start equals goal");
  if (start.y <= goal_px.y) throw Error("degenerate-path", "start must lie below goal");

  std::vector<PathSample> out;
  out.reserve(size_t(n_samples));
  for (int i = 0; i < n_samples; ++i) {
    double t = double(i) / (n_samples - 1);
    PixelPoint p{start.x + t * (goal_px.x - start.x), start.y + t * (goal_px.y - start.y)};
    out.push_back({p, double(depth.at_nearest(p.x, p.y))});
  }
  return out;
}

double lateral_offset_px(double z_m, double fx_px, double half_width_m) {
  if (z_m <= 0) throw Error("invalid-depth", "depth must be positive");
  return (half_width_m / z_m) * fx_px;
}

std::pair<PixelPoint, PixelPoint> lateral_offsets(PixelPoint point, double z_m,
                                                  const CameraModel& camera, int image_width,
                                                  double half_width_m) {
  double offset = lateral_offset_px(z_m, camera.fx_px, half_width_m);
  double max_x = double(image_width - 1);
  PixelPoint left{std::clamp(point.x - offset, 0.0, max_x), point.y};
  PixelPoint right{std::clamp(point.x + offset, 0.0, max_x), point.y};
  return {left, right};
}

PathGeometry build_path_geometry(const DepthMap& depth, const CameraModel& camera,
                                 const GoalPoint& goal, const PathParams& params) {
  const int w = depth.width;
  const int h = depth.height;
  PixelPoint start = norm_to_px(0.5, 1.0, w, h);
  PixelPoint goal_px = norm_to_px(goal.x_norm, goal.y_norm, w, h);

  PathGeometry geo;
  geo.start = start;
  geo.goal = goal;
  geo.polyline = build_path_polyline(start, goal_px, depth, params.n_samples);

  // Fill invalid sample depths from the nearest valid sample along the path.
  std::vector<int> valid_idx;
  for (size_t i = 0; i < geo.polyline.size(); ++i)
    if (DepthMap::is_valid(float(geo.polyline[i].depth_m))) valid_idx.push_back(int(i));
  if (valid_idx.empty()) throw Error("no-valid-depth", "no valid depth along path");
  for (size_t i = 0; i < geo.polyline.size(); ++i) {
    if (DepthMap::is_valid(float(geo.polyline[i].depth_m))) continue;
    int best = valid_idx.front();
    for (int j : valid_idx)
      if (std::abs(j - int(i)) < std::abs(best - int(i))) best = j;
    geo.polyline[i].depth_m = geo.polyline[best].depth_m;
  }

  geo.left_points.reserve(geo.polyline.size());
  geo.right_points.reserve(geo.polyline.size());
  for (const auto& sample : geo.polyline) {
    auto [l, r] = lateral_offsets(sample.point, sample.depth_m, camera, w, params.half_width_m);
    geo.left_points.push_back(l);
    geo.right_points.push_back(r);
  }

  geo.polygons = build_region_polygons(geo.polyline, geo.left_points, geo.right_points, w, h);
  geo.cutoff_depth_m = goal.depth_m + params.cutoff_margin_m;
  return geo;
}

}  // namespace walkguide::geom
