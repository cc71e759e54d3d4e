#pragma once

// Target-location representations on an ERP frame.

#include <cstdint>
#include <optional>
#include <vector>

#include "omnitrack/sphere.hpp"

namespace omni {

/// Pixel rectangle [cx, cy, w, h, gamma]. gamma = 0 is an axis-aligned BBox,
/// otherwise an rBBox whose width axis is rotated by gamma from +u toward +v.
/// cx may describe a border-crossing box; consumers treat u modulo W.
struct Bbox {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;
  double gamma = 0.0;
};

/// Angular region [clon, clat, theta, phi, gamma], all radians.
/// theta/phi are the horizontal/vertical field-of-view extents.
struct Bfov {
  double clon = 0.0;
  double clat = 0.0;
  double theta = 0.0;
  double phi = 0.0;
  double gamma = 0.0;

  LonLat center() const { return {clon, clat}; }
  /// Rotation carrying the local region frame onto the sphere.
  Rotation frame() const { return view_rotation(clon, clat, gamma); }
};

/// Binary raster aligned with an ERP frame. Stored values are 0 or 1.
class Mask {
 public:
  explicit Mask(ErpDims dims);
  Mask(ErpDims dims, std::vector<std::uint8_t> bits);

  const ErpDims& dims() const { return dims_; }
  int width() const { return dims_.width(); }
  int height() const { return dims_.height(); }

  bool at(int row, int col) const { return bits_[static_cast<std::size_t>(row) * width() + col] != 0; }
  void set(int row, int col, bool on) {
    bits_[static_cast<std::size_t>(row) * width() + col] = on ? 1 : 0;
  }
  bool empty() const;
  std::size_t count() const;
  const std::vector<std::uint8_t>& bits() const { return bits_; }

 private:
  ErpDims dims_;
  std::vector<std::uint8_t> bits_;
};

struct FrameAnnotation {
  int frame = 0;
  std::optional<Bbox> bbox;
  std::optional<Bbox> rbbox;
  std::optional<Bfov> bfov;
  std::optional<Bfov> rbfov;
  std::optional<Mask> mask;

  bool has_any() const { return bbox || rbbox || bfov || rbfov || mask; }
};

/// Wraps cx into [0, W) and gamma into (-pi/2, pi/2], swapping w and h for
/// every quarter turn removed. Throws ValidationError on non-positive sizes.
Bbox canonicalize_bbox(const Bbox& b, const ErpDims& d);

/// Returns f unchanged if theta in (0, 2pi], phi in (0, pi] and the center is
/// a valid direction; throws ValidationError otherwise.
Bfov validate_bfov(const Bfov& f);

}  // namespace omni
