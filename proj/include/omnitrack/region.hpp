#pragma once

// Regions on the sphere described by a (r)BFoV, their ERP realization as a
// dense direction grid, and the maps between local (unwarped) images and
// the global frame.
//
// A region is the image of a local patch Omega under
// R_y(clon) * R_x(clat) * R_z(gamma). Omega is either a gnomonic rectangle on
// the plane Z = 1 (tangent mode) or a longitude/latitude patch of the unit
// sphere (sphere mode). Tangent mode is used iff theta < 90 deg and
// phi < 90 deg.
//
// Local image coordinates: x in [0, Wr], y in [0, Hr]. The direction grid has
// Wr x Hr nodes; node (row i, col j) sits at x = j * Wr / (Wr - 1) so that the
// full local image spans exactly the region's field of view.

#include <optional>
#include <span>
#include <vector>

#include "omnitrack/annotations.hpp"
#include "omnitrack/image.hpp"
#include "omnitrack/sphere.hpp"

namespace omni {

enum class RegionMode { kTangent, kSphere };

/// Ablation switch: kForceTangent realizes every region on a tangent plane.
enum class ModeOverride { kNone, kForceTangent };

/// The extended-BFoV gating rule.
RegionMode select_region_mode(double theta, double phi);

/// Unwarp resolution. By default the local image keeps the native equatorial
/// pixel density of the ERP frame (W / 360 px per degree), capped so the
/// longer side has at most `max_side` pixels.
struct ResolutionPolicy {
  double pixels_per_degree = 0.0;  // <= 0: W / 360
  int max_side = 1024;
  int min_side = 9;
  int fixed_width = 0;  // > 0 overrides the policy
  int fixed_height = 0;
};

/// Local-frame directions, row-major height x width, sampled on a uniform
/// grid of the plane Z = 1 with X in [-tan(theta/2), tan(theta/2)] and
/// Y in [-tan(phi/2), tan(phi/2)] (row 0 is the top, i.e. negative Y).
/// Throws DomainError unless 0 < theta, phi < pi and width, height >= 2.
std::vector<Vec3> tangent_grid(double theta, double phi, int width, int height);

/// Local-frame directions (cos P sin T, -sin P, cos P cos T) for a uniform
/// grid of T in [-theta/2, theta/2] and P in [phi/2, -phi/2] (top row first).
/// Throws DomainError unless theta in (0, 2pi] and phi in (0, pi].
std::vector<Vec3> sphere_grid(double theta, double phi, int width, int height);

/// Analytic membership test for the region of `f` realized in `mode`.
class RegionTest {
 public:
  RegionTest(const Bfov& f, RegionMode mode);
  bool contains(const Vec3& dir) const;
  /// Angular radius of a cap around the center that encloses the region.
  double cap_radius() const { return cap_radius_; }
  Vec3 center() const { return center_; }

 private:
  Rotation to_local_;
  RegionMode mode_;
  double tan_x_ = 0.0, tan_y_ = 0.0;
  double cos_half_theta_ = 0.0, sin_half_phi_ = 0.0;
  bool full_lon_ = false;
  double cap_radius_ = 0.0;
  Vec3 center_;
};

class RegionMap {
 public:
  RegionMap(const Bfov& f, const ErpDims& dims, RegionMode mode, int width, int height,
            bool overridden = false);

  int width() const { return width_; }
  int height() const { return height_; }
  const Bfov& bfov() const { return bfov_; }
  const ErpDims& dims() const { return dims_; }
  RegionMode mode() const { return mode_; }
  /// True when the mode departs from the gating rule (ablation only).
  bool overridden() const { return overridden_; }

  const Vec3& dir(int row, int col) const { return dirs_[static_cast<std::size_t>(row) * width_ + col]; }
  std::span<const Vec3> dirs() const { return dirs_; }

  /// Exact inverse of the grid parameterization; nullopt when the direction
  /// has no image in the local patch (behind a tangent plane).
  std::optional<PixCoord> to_local(const Vec3& global) const;

  /// Bilinear interpolation of the node directions, renormalized.
  /// Throws DomainError for points outside [0, Wr] x [0, Hr].
  Vec3 local_to_global(const PixCoord& local) const;

  bool contains(const Vec3& global) const { return test_.contains(global); }

 private:
  Bfov bfov_;
  ErpDims dims_;
  RegionMode mode_;
  bool overridden_;
  int width_;
  int height_;
  std::vector<Vec3> dirs_;
  Rotation frame_;
  RegionTest test_;
};

/// Validates f, picks the mode (gating rule unless overridden), sizes the
/// grid per policy and rotates it onto the sphere.
RegionMap build_region(const Bfov& f, const ErpDims& dims, const ResolutionPolicy& policy = {},
                       ModeOverride override_mode = ModeOverride::kNone);

/// Samples `frame` at every node with bilinear interpolation, wrapping
/// horizontally across the seam. Rows are processed in parallel.
/// Throws ValidationError if the frame size differs from rm.dims().
Image unwarp(const Image& frame, const RegionMap& rm, int jobs = 1);

std::vector<LonLat> local_points_to_global(std::span<const PixCoord> points, const RegionMap& rm);

/// 4 * per_edge points walking the outline of a (possibly rotated) box given
/// in local pixel units, clamped into [0, Wr] x [0, Hr].
std::vector<PixCoord> box_outline(const Bbox& local_box, int width, int height, int per_edge = 64);

/// Smallest (rotated) rectangle on the ERP image covering the projected
/// points. Seam-spanning sets are first unwrapped by the circular shift that
/// minimizes their horizontal extent. Result is canonical.
Bbox points_to_min_bbox(std::span<const LonLat> points, const ErpDims& d, bool rotated);

/// Bounding field of view of a point set: center the points on their
/// spherical centroid, rotate by -gamma (rotated mode), measure the
/// longitude/latitude ranges and recenter on their midpoints. gamma comes
/// from `gamma_hint` or, when absent, from a minimum-area rectangle of the
/// centered points. See fit_bfov_extents for `contain`.
Bfov points_to_bfov(std::span<const LonLat> points, bool rotated,
                    std::optional<double> gamma_hint = std::nullopt, bool contain = true);

/// Extent measurement shared with the mask converter: ranges in the frame of
/// (center, gamma), recentering on their midpoints, then extents re-measured
/// symmetrically in the final frame with the coordinates of the mode that
/// the result will be realized in, so every input direction lies inside.
/// With `contain` false the extents stay in longitude/latitude of the final
/// frame even when the result is a tangent region.
Bfov fit_bfov_extents(std::span<const Vec3> dirs, const Vec3& center, double gamma,
                      bool contain = true);

/// gamma from a minimum-area rectangle of dirs centered on `center`: the
/// angle of the longer side, folded into (-pi/2, pi/2].
double estimate_gamma(std::span<const Vec3> dirs, const Vec3& center);

/// Solid angle (sr) of the patch spanned by a direction grid, summing the
/// two geodesic triangles of every cell.
double grid_solid_angle(std::span<const Vec3> dirs, int width, int height);

/// One run of lat-lon grid cells on a row: columns begin..begin+count-1,
/// taken modulo the grid width.
struct RowSpan {
  int row = 0;
  int begin = 0;
  int count = 0;
};

/// Cells of a lat-lon grid whose centers may lie within `radius` of `center`.
std::vector<RowSpan> cap_spans(const ErpDims& grid, const Vec3& center, double radius);

/// Area (sr) of a region rasterized on a lat-lon grid: exact cell areas of
/// the cells whose centers lie in the region.
double raster_area(const RegionTest& test, const ErpDims& grid);

}  // namespace omni
