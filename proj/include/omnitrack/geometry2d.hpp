#pragma once

// Planar helpers shared by box fitting and box IoU.

#include <span>
#include <vector>

namespace omni::geom {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Rectangle with its width axis at `angle` radians from +x toward +y.
struct RotatedRect {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;
  double angle = 0.0;

  double area() const { return w * h; }
};

/// Counter-clockwise hull (in a y-up sense) without collinear points.
std::vector<Point2> convex_hull(std::span<const Point2> pts);

/// Globally minimal-area enclosing rectangle via rotating calipers.
/// Degenerate inputs give zero-thickness rectangles. Among equal-area
/// candidates the one with the smallest |angle| wins. angle is in
/// (-pi/2, pi/2]. Throws DomainError on empty input.
RotatedRect min_area_rect(std::span<const Point2> pts);

/// Axis-aligned bounding rectangle.
RotatedRect bounding_rect(std::span<const Point2> pts);

std::vector<Point2> rect_corners(const RotatedRect& r);

/// Signed shoelace area (positive for counter-clockwise in y-up axes).
double polygon_area(std::span<const Point2> poly);

/// Intersection of two convex polygons (Sutherland-Hodgman).
std::vector<Point2> clip_convex(std::span<const Point2> subject, std::span<const Point2> clip);

/// True if p lies inside r, with `slack` of tolerance on every side.
bool rect_contains(const RotatedRect& r, Point2 p, double slack = 0.0);

}  // namespace omni::geom
