#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "walkguide/geom/types.hpp"

namespace walkguide::geom {

struct GoalParams {
  double target_dist_m = 10.0;
  double max_angle_deg = 45.0;
};

struct PathParams {
  int n_samples = 20;
  double half_width_m = 1.0;   // 2.0 reproduces the literal per-side offset factor
  double cutoff_margin_m = 3.0;
  GoalParams goal;
};

// Draws a direction uniformly in [-max_angle, +max_angle] about the vertical
// axis and marches the image ray from the bottom-center start, returning the
// first pixel whose depth reaches target_dist_m. Falls back to the flat-ground
// pinhole projection of a point target_dist_m ahead when the march runs off
// the image. Pure function of (depth, camera, seed, params).
GoalPoint sample_goal_point(const DepthMap& depth, const CameraModel& camera, uint64_t rng_seed,
                            const GoalParams& params = {});

// n_samples points linearly interpolated from start to goal (both inclusive),
// each annotated with the raw nearest-pixel depth value.
std::vector<PathSample> build_path_polyline(PixelPoint start, PixelPoint goal_px,
                                            const DepthMap& depth, int n_samples = 20);

// Unclamped per-side pixel offset: (half_width_m / z_m) * fx_px.
double lateral_offset_px(double z_m, double fx_px, double half_width_m);

// Left/right points at the sample's row, x clamped to [0, image_width-1].
std::pair<PixelPoint, PixelPoint> lateral_offsets(PixelPoint point, double z_m,
                                                  const CameraModel& camera, int image_width,
                                                  double half_width_m = 1.0);

// Full geometry for one scene: polyline from the bottom-center start to the
// goal, lateral offsets per sample, region polygons, and the cutoff depth
// (goal depth + margin). Invalid polyline depths are filled from the nearest
// valid sample.
PathGeometry build_path_geometry(const DepthMap& depth, const CameraModel& camera,
                                 const GoalPoint& goal, const PathParams& params = {});

}  // namespace walkguide::geom
