#pragma once

#include <array>
#include <vector>

#include "walkguide/geom/types.hpp"
#include "walkguide/image/image.hpp"

namespace walkguide::geom {

// Left region: top-left corner, bottom-left corner, then the left points
// bottom-to-top. Right region mirrors it. Path region: left points
// bottom-to-top followed by right points top-to-bottom (closed ring).
RegionPolygons build_region_polygons(const std::vector<PathSample>& polyline,
                                     const std::vector<PixelPoint>& left_points,
                                     const std::vector<PixelPoint>& right_points, int image_width,
                                     int image_height);

// Even-odd scanline fill, boundary pixels included.
void fill_polygon(Mask& mask, const Polygon& polygon);

// Binary masks for the three regions. Pixels shared with the path polygon
// tie-break to the path mask; the three masks are pairwise disjoint.
RegionMaskSet rasterize_masks(const RegionPolygons& polygons, int image_width, int image_height);
RegionMaskSet rasterize_masks(const RegionPolygons& polygons, int image_width, int image_height,
                              const DepthMap& depth, double cutoff_depth_m);

double background_cutoff_depth(double goal_depth_m, double margin_m = 3.0);

// Clears mask pixels whose depth exceeds goal_depth_m + margin_m. Invalid
// depth pixels count as beyond the cutoff.
void apply_background_cutoff(RegionMaskSet& masks, const DepthMap& depth, double goal_depth_m,
                             double margin_m = 3.0);

// Pixels where mask=0 are replaced by fill; mask=1 pixels are preserved.
image::ImageBuffer mask_image(const image::ImageBuffer& img, const Mask& mask,
                              std::array<uint8_t, 3> fill = {0, 0, 0});

// Fraction of bbox pixels covered by set mask pixels. bbox is normalized
// [x1, y1, x2, y2], top-left origin.
double region_overlap(const std::array<double, 4>& bbox_norm, const Mask& mask);

}  // namespace walkguide::geom
