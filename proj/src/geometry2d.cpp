#include "omnitrack/geometry2d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "omnitrack/errors.hpp"

namespace omni::geom {

namespace {

constexpr double kPi = std::numbers::pi;

double cross3(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double dotp(const Point2& a, const Point2& b) { return a.x * b.x + a.y * b.y; }

// Folds a line direction angle into (-pi/2, pi/2].
double fold_angle(double a) {
  while (a > kPi / 2) a -= kPi;
  while (a <= -kPi / 2) a += kPi;
  return a;
}

// True when candidate should replace the incumbent.
bool better(const RotatedRect& cand, const RotatedRect& best) {
  const double scale = std::max({std::abs(best.area()), std::abs(cand.area()), 1e-300});
  const double diff = cand.area() - best.area();
  if (diff < -1e-10 * scale) return true;
  if (diff > 1e-10 * scale) return false;
  const double ca = std::abs(cand.angle), ba = std::abs(best.angle);
  if (ca < ba - 1e-12) return true;
  if (ca > ba + 1e-12) return false;
  return cand.angle > best.angle;
}

}  // namespace

std::vector<Point2> convex_hull(std::span<const Point2> pts) {
  std::vector<Point2> p(pts.begin(), pts.end());
  std::sort(p.begin(), p.end(), [](const Point2& a, const Point2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  p.erase(std::unique(p.begin(), p.end(),
                      [](const Point2& a, const Point2& b) { return a.x == b.x && a.y == b.y; }),
          p.end());
  if (p.size() < 3) return p;

  std::vector<Point2> hull(2 * p.size());
  std::size_t k = 0;
  for (const auto& pt : p) {
    while (k >= 2 && cross3(hull[k - 2], hull[k - 1], pt) <= 0) --k;
    hull[k++] = pt;
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross3(hull[k - 2], hull[k - 1], p[i]) <= 0) --k;
    hull[k++] = p[i];
  }
  hull.resize(k - 1);
  return hull;
}

RotatedRect bounding_rect(std::span<const Point2> pts) {
  if (pts.empty()) throw DomainError("bounding_rect of an empty point set");
  double x0 = pts[0].x, x1 = pts[0].x, y0 = pts[0].y, y1 = pts[0].y;
  for (const auto& p : pts) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  return {(x0 + x1) / 2, (y0 + y1) / 2, x1 - x0, y1 - y0, 0.0};
}

RotatedRect min_area_rect(std::span<const Point2> pts) {
  if (pts.empty()) throw DomainError("min_area_rect of an empty point set");
  const std::vector<Point2> hull = convex_hull(pts);
  const std::size_t n = hull.size();
  if (n == 1) return {hull[0].x, hull[0].y, 0.0, 0.0, 0.0};
  if (n == 2) {
    const double dx = hull[1].x - hull[0].x, dy = hull[1].y - hull[0].y;
    double ang = fold_angle(std::atan2(dy, dx));
    const double len = std::hypot(dx, dy);
    RotatedRect r{(hull[0].x + hull[1].x) / 2, (hull[0].y + hull[1].y) / 2, len, 0.0, ang};
    // A horizontal-or-vertical segment prefers the zero angle.
    if (std::abs(std::abs(ang) - kPi / 2) < 1e-15) r = {r.cx, r.cy, 0.0, len, 0.0};
    return r;
  }

  auto at = [&](std::size_t i) -> const Point2& { return hull[i % n]; };
  RotatedRect best;
  bool have = false;
  std::size_t j = 0, k = 0, l = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = at(i), b = at(i + 1);
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const Point2 e{(b.x - a.x) / len, (b.y - a.y) / len};
    const Point2 nrm{-e.y, e.x};
    if (i == 0) {
      j = 1;
      while (dotp(at(j + 1), e) > dotp(at(j), e)) ++j;
      k = j;
      while (dotp(at(k + 1), nrm) > dotp(at(k), nrm)) ++k;
      l = k;
      while (dotp(at(l + 1), e) < dotp(at(l), e)) ++l;
    } else {
      while (dotp(at(j + 1), e) > dotp(at(j), e)) ++j;
      if (k < j) k = j;
      while (dotp(at(k + 1), nrm) > dotp(at(k), nrm)) ++k;
      if (l < k) l = k;
      while (dotp(at(l + 1), e) < dotp(at(l), e)) ++l;
    }
    const double e_max = dotp(at(j), e);
    const double e_min = dotp(at(l), e);
    const double n_min = dotp(a, nrm);
    const double n_max = dotp(at(k), nrm);
    const double em = 0.5 * (e_min + e_max), nm = 0.5 * (n_min + n_max);
    RotatedRect cand{e.x * em + nrm.x * nm, e.y * em + nrm.y * nm, e_max - e_min, n_max - n_min,
                     std::atan2(e.y, e.x)};
    // Fold the width axis into (-pi/2, pi/2]; a quarter turn swaps w/h.
    double ang = cand.angle;
    while (ang > kPi / 2) ang -= kPi;
    while (ang <= -kPi / 2) ang += kPi;
    cand.angle = ang;
    // The perpendicular reading of the same rectangle may have a smaller |angle|.
    RotatedRect alt = cand;
    alt.angle = fold_angle(ang + kPi / 2);
    std::swap(alt.w, alt.h);
    if (std::abs(alt.angle) < std::abs(cand.angle) - 1e-12) cand = alt;
    if (!have || better(cand, best)) {
      best = cand;
      have = true;
    }
  }
  return best;
}

std::vector<Point2> rect_corners(const RotatedRect& r) {
  const double c = std::cos(r.angle), s = std::sin(r.angle);
  const Point2 e{c, s}, nrm{-s, c};
  const double hw = r.w / 2, hh = r.h / 2;
  auto corner = [&](double a, double b) {
    return Point2{r.cx + e.x * a + nrm.x * b, r.cy + e.y * a + nrm.y * b};
  };
  return {corner(-hw, -hh), corner(hw, -hh), corner(hw, hh), corner(-hw, hh)};
}

double polygon_area(std::span<const Point2> poly) {
  double acc = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % poly.size()];
    acc += p.x * q.y - q.x * p.y;
  }
  return 0.5 * acc;
}

std::vector<Point2> clip_convex(std::span<const Point2> subject, std::span<const Point2> clip) {
  std::vector<Point2> out(subject.begin(), subject.end());
  std::vector<Point2> clipper(clip.begin(), clip.end());
  if (polygon_area(out) < 0) std::reverse(out.begin(), out.end());
  if (polygon_area(clipper) < 0) std::reverse(clipper.begin(), clipper.end());

  for (std::size_t i = 0; i < clipper.size() && !out.empty(); ++i) {
    const Point2 a = clipper[i];
    const Point2 b = clipper[(i + 1) % clipper.size()];
    auto side = [&](const Point2& p) { return cross3(a, b, p); };
    std::vector<Point2> next;
    next.reserve(out.size() + 2);
    for (std::size_t j = 0; j < out.size(); ++j) {
      const Point2 p = out[j];
      const Point2 q = out[(j + 1) % out.size()];
      const double sp = side(p), sq = side(q);
      if (sp >= 0) next.push_back(p);
      if ((sp >= 0) != (sq >= 0)) {
        const double t = sp / (sp - sq);
        next.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
      }
    }
    out = std::move(next);
  }
  return out;
}

bool rect_contains(const RotatedRect& r, Point2 p, double slack) {
  const double c = std::cos(r.angle), s = std::sin(r.angle);
  const double dx = p.x - r.cx, dy = p.y - r.cy;
  const double a = dx * c + dy * s;
  const double b = -dx * s + dy * c;
  return std::abs(a) <= r.w / 2 + slack && std::abs(b) <= r.h / 2 + slack;
}

}  // namespace omni::geom
