#pragma once

// Mask to (r)BBox / (r)BFoV conversion.

#include <optional>
#include <vector>

#include "omnitrack/annotations.hpp"
#include "omnitrack/sphere.hpp"

namespace omni {

/// 4-connected components of the set pixels. Columns 0 and W-1 are
/// neighbors, so a target cut by the seam is one segment.
struct MaskSegments {
  std::vector<int> label;          // per pixel, -1 for background
  std::vector<std::size_t> sizes;  // pixel count per segment
  int largest = -1;                // ties go to the lowest id
};

MaskSegments label_segments(const Mask& m);

/// Direction through the center of ERP pixel (row, col).
Vec3 pixel_dir(int row, int col, const ErpDims& d);

/// Solid angle of one pixel of `row`.
double pixel_solid_angle(int row, const ErpDims& d);

/// Inverse-mapped nearest-neighbour remap: out(p) = m(r^-1 * dir(p)).
Mask rotate_mask(const Mask& m, const Rotation& r);

std::optional<Bbox> mask_to_bbox(const Mask& m, bool need_rotation);
std::optional<Bfov> mask_to_bfov(const Mask& m, bool need_rotation);

}  // namespace omni
