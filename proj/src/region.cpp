#include "omnitrack/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "omnitrack/errors.hpp"
#include "omnitrack/geometry2d.hpp"
#include "omnitrack/parallel.hpp"

namespace omni {

namespace {

constexpr double kGateAngle = kHalfPi;  // 90 degrees
constexpr double kBoundarySlack = 1e-12;

void check_grid_size(int width, int height) {
  if (width < 2 || height < 2) {
    throw DomainError("region grids need at least 2x2 nodes, got " + std::to_string(width) + "x" +
                      std::to_string(height));
  }
}

int odd_side(double v, const ResolutionPolicy& p) {
  long n = std::lround(v);
  n = std::clamp<long>(n, p.min_side, p.max_side);
  if (n % 2 == 0) n = (n + 1 <= p.max_side) ? n + 1 : n - 1;
  return static_cast<int>(std::max<long>(n, 2));
}

double spherical_triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  // Van Oosterom & Strackee.
  const double num = std::abs(dot(a, cross(b, c)));
  const double den = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
  return 2.0 * std::atan2(num, den);
}

}  // namespace

RegionMode select_region_mode(double theta, double phi) {
  return (theta < kGateAngle && phi < kGateAngle) ? RegionMode::kTangent : RegionMode::kSphere;
}

std::vector<Vec3> tangent_grid(double theta, double phi, int width, int height) {
  if (!(theta > 0.0 && theta < kPi) || !(phi > 0.0 && phi < kPi)) {
    throw DomainError("tangent plane cannot represent a field of view of " +
                      std::to_string(rad2deg(theta)) + "x" + std::to_string(rad2deg(phi)) +
                      " deg (needs both < 180)");
  }
  check_grid_size(width, height);
  const double tx = std::tan(theta / 2), ty = std::tan(phi / 2);
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(width) * height);
  for (int i = 0; i < height; ++i) {
    const double y = -ty + 2.0 * ty * i / (height - 1);
    for (int j = 0; j < width; ++j) {
      const double x = -tx + 2.0 * tx * j / (width - 1);
      out.push_back(normalized({x, y, 1.0}));
    }
  }
  return out;
}

std::vector<Vec3> sphere_grid(double theta, double phi, int width, int height) {
  if (!(theta > 0.0 && theta <= kTwoPi + kBoundarySlack) ||
      !(phi > 0.0 && phi <= kPi + kBoundarySlack)) {
    throw DomainError("spherical patch field of view " + std::to_string(rad2deg(theta)) + "x" +
                      std::to_string(rad2deg(phi)) + " deg outside (0,360]x(0,180]");
  }
  check_grid_size(width, height);
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(width) * height);
  std::vector<double> sin_t(width), cos_t(width);
  for (int j = 0; j < width; ++j) {
    const double t = -theta / 2 + theta * j / (width - 1);
    sin_t[j] = std::sin(t);
    cos_t[j] = std::cos(t);
  }
  for (int i = 0; i < height; ++i) {
    const double p = phi / 2 - phi * i / (height - 1);
    const double cp = std::cos(p), sp = std::sin(p);
    for (int j = 0; j < width; ++j) out.push_back({cp * sin_t[j], -sp, cp * cos_t[j]});
  }
  return out;
}

RegionTest::RegionTest(const Bfov& f, RegionMode mode)
    : to_local_(f.frame().transposed()), mode_(mode), center_(sph_to_vec(f.center())) {
  if (mode == RegionMode::kTangent) {
    if (!(f.theta < kPi) || !(f.phi < kPi)) {
      throw DomainError("tangent region needs theta, phi < 180 deg");
    }
    tan_x_ = std::tan(f.theta / 2);
    tan_y_ = std::tan(f.phi / 2);
    cap_radius_ = std::atan(std::hypot(tan_x_, tan_y_));
  } else {
    const double half_t = std::min(f.theta / 2, kPi);
    const double half_p = std::min(f.phi / 2, kHalfPi);
    full_lon_ = half_t >= kPi;
    cos_half_theta_ = std::cos(half_t);
    sin_half_phi_ = std::sin(half_p);
    cap_radius_ = half_t <= kHalfPi ? std::acos(std::cos(half_p) * std::cos(half_t)) : half_t;
  }
}

bool RegionTest::contains(const Vec3& dir) const {
  const Vec3 l = to_local_ * dir;
  if (mode_ == RegionMode::kTangent) {
    if (l.z <= 0.0) return false;
    return std::abs(l.x) <= (tan_x_ + kBoundarySlack) * l.z &&
           std::abs(l.y) <= (tan_y_ + kBoundarySlack) * l.z;
  }
  if (std::abs(l.y) > sin_half_phi_ + kBoundarySlack) return false;
  if (full_lon_) return true;
  const double rho = std::hypot(l.x, l.z);
  return l.z >= cos_half_theta_ * rho - kBoundarySlack;
}

RegionMap::RegionMap(const Bfov& f, const ErpDims& dims, RegionMode mode, int width, int height,
                     bool overridden)
    : bfov_(validate_bfov(f)),
      dims_(dims),
      mode_(mode),
      overridden_(overridden),
      width_(width),
      height_(height),
      frame_(f.frame()),
      test_(f, mode) {
  dirs_ = mode == RegionMode::kTangent ? tangent_grid(f.theta, f.phi, width, height)
                                       : sphere_grid(f.theta, f.phi, width, height);
  for (auto& d : dirs_) d = frame_ * d;
}

std::optional<PixCoord> RegionMap::to_local(const Vec3& global) const {
  const Vec3 l = frame_.transposed() * global;
  if (mode_ == RegionMode::kTangent) {
    if (l.z <= 1e-12) return std::nullopt;
    const double tx = std::tan(bfov_.theta / 2), ty = std::tan(bfov_.phi / 2);
    const double X = l.x / l.z, Y = l.y / l.z;
    return PixCoord{width_ * (X + tx) / (2 * tx), height_ * (Y + ty) / (2 * ty)};
  }
  const double t = std::atan2(l.x, l.z);
  const double p = std::asin(std::clamp(-l.y, -1.0, 1.0));
  return PixCoord{width_ * (t + bfov_.theta / 2) / bfov_.theta,
                  height_ * (bfov_.phi / 2 - p) / bfov_.phi};
}

Vec3 RegionMap::local_to_global(const PixCoord& local) const {
  constexpr double kEdge = 1e-9;
  if (!(local.u >= -kEdge && local.u <= width_ + kEdge && local.v >= -kEdge &&
        local.v <= height_ + kEdge)) {
    throw DomainError("local point (" + std::to_string(local.u) + ", " + std::to_string(local.v) +
                      ") outside the " + std::to_string(width_) + "x" + std::to_string(height_) +
                      " local image");
  }
  const double fj = std::clamp(local.u, 0.0, double(width_)) * (width_ - 1) / width_;
  const double fi = std::clamp(local.v, 0.0, double(height_)) * (height_ - 1) / height_;
  const int j0 = std::clamp(static_cast<int>(std::floor(fj)), 0, width_ - 2);
  const int i0 = std::clamp(static_cast<int>(std::floor(fi)), 0, height_ - 2);
  const double tj = fj - j0, ti = fi - i0;
  // Exact node hits return the stored direction untouched.
  if (tj == 0.0 && ti == 0.0) return dir(i0, j0);
  const Vec3 top = dir(i0, j0) * (1 - tj) + dir(i0, j0 + 1) * tj;
  const Vec3 bot = dir(i0 + 1, j0) * (1 - tj) + dir(i0 + 1, j0 + 1) * tj;
  return normalized(top * (1 - ti) + bot * ti);
}

RegionMap build_region(const Bfov& f, const ErpDims& dims, const ResolutionPolicy& policy,
                       ModeOverride override_mode) {
  validate_bfov(f);
  const RegionMode gated = select_region_mode(f.theta, f.phi);
  const RegionMode mode =
      override_mode == ModeOverride::kForceTangent ? RegionMode::kTangent : gated;

  int width = 0, height = 0;
  if (policy.fixed_width > 0 && policy.fixed_height > 0) {
    width = policy.fixed_width;
    height = policy.fixed_height;
  } else {
    const double ppd = policy.pixels_per_degree > 0 ? policy.pixels_per_degree : dims.width() / 360.0;
    double ext_x = 0, ext_y = 0;
    if (mode == RegionMode::kTangent) {
      if (!(f.theta < kPi && f.phi < kPi)) {
        throw DomainError("tangent plane cannot represent a field of view >= 180 deg");
      }
      // Plane units equal radians at the tangent point.
      ext_x = rad2deg(2 * std::tan(f.theta / 2));
      ext_y = rad2deg(2 * std::tan(f.phi / 2));
    } else {
      ext_x = rad2deg(f.theta);
      ext_y = rad2deg(f.phi);
    }
    double wr = ext_x * ppd, hr = ext_y * ppd;
    const double longest = std::max(wr, hr);
    if (longest > policy.max_side) {
      wr *= policy.max_side / longest;
      hr *= policy.max_side / longest;
    }
    width = odd_side(wr, policy);
    height = odd_side(hr, policy);
  }
  return RegionMap(f, dims, mode, width, height, mode != gated);
}

Image unwarp(const Image& frame, const RegionMap& rm, int jobs) {
  const ErpDims& d = rm.dims();
  if (frame.width() != d.width() || frame.height() != d.height()) {
    throw ValidationError("frame is " + std::to_string(frame.width()) + "x" +
                          std::to_string(frame.height()) + " but the region targets " +
                          std::to_string(d.width()) + "x" + std::to_string(d.height()));
  }
  const int W = d.width(), H = d.height(), C = frame.channels();
  Image out(rm.width(), rm.height(), C);
  parallel_for(static_cast<std::size_t>(rm.height()), jobs, [&](std::size_t row) {
    const int i = static_cast<int>(row);
    std::uint8_t* dst = out.row(i);
    for (int j = 0; j < rm.width(); ++j) {
      const Vec3& v = rm.dir(i, j);
      const double lon = std::atan2(v.x, v.z);
      const double lat = std::atan2(-v.y, std::hypot(v.x, v.z));
      const double px = (lon / kTwoPi + 0.5) * W - 0.5;
      const double py = std::clamp((-lat / kPi + 0.5) * H - 0.5, 0.0, H - 1.0);
      const double fx = std::floor(px);
      const double tx = px - fx;
      const int x0 = static_cast<int>(wrap_mod(fx, W));
      const int x1 = (x0 + 1) % W;
      const int y0 = std::min(static_cast<int>(py), H - 1);
      const int y1 = std::min(y0 + 1, H - 1);
      const double ty = py - y0;
      const std::uint8_t* r0 = frame.row(y0);
      const std::uint8_t* r1 = frame.row(y1);
      for (int c = 0; c < C; ++c) {
        const double top = r0[x0 * C + c] * (1 - tx) + r0[x1 * C + c] * tx;
        const double bot = r1[x0 * C + c] * (1 - tx) + r1[x1 * C + c] * tx;
        const double val = top * (1 - ty) + bot * ty;
        dst[j * C + c] = static_cast<std::uint8_t>(std::clamp(std::lround(val), 0L, 255L));
      }
    }
  });
  return out;
}

std::vector<LonLat> local_points_to_global(std::span<const PixCoord> points, const RegionMap& rm) {
  std::vector<LonLat> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(vec_to_sph(rm.local_to_global(p)));
  return out;
}

std::vector<PixCoord> box_outline(const Bbox& local_box, int width, int height, int per_edge) {
  if (per_edge < 1) throw DomainError("box_outline needs at least one sample per edge");
  const auto corners = geom::rect_corners(
      {local_box.cx, local_box.cy, local_box.w, local_box.h, local_box.gamma});
  std::vector<PixCoord> out;
  out.reserve(static_cast<std::size_t>(4 * per_edge));
  for (int e = 0; e < 4; ++e) {
    const auto& a = corners[e];
    const auto& b = corners[(e + 1) % 4];
    for (int s = 0; s < per_edge; ++s) {
      const double t = static_cast<double>(s) / per_edge;
      out.push_back({std::clamp(a.x + (b.x - a.x) * t, 0.0, double(width)),
                     std::clamp(a.y + (b.y - a.y) * t, 0.0, double(height))});
    }
  }
  return out;
}

Bbox points_to_min_bbox(std::span<const LonLat> points, const ErpDims& d, bool rotated) {
  if (points.empty()) throw DomainError("points_to_min_bbox needs at least one point");
  const double W = d.width();
  std::vector<geom::Point2> px;
  px.reserve(points.size());
  for (const auto& p : points) {
    const PixCoord q = sph_to_pix(p, d);
    px.push_back({q.u, q.v});
  }

  // Unwrap across the seam at the widest empty circular gap.
  std::vector<double> us;
  us.reserve(px.size());
  for (const auto& p : px) us.push_back(p.x);
  std::sort(us.begin(), us.end());
  double best_gap = us.front() + W - us.back();
  double start = us.front();
  for (std::size_t i = 1; i < us.size(); ++i) {
    const double gap = us[i] - us[i - 1];
    if (gap > best_gap) {
      best_gap = gap;
      start = us[i];
    }
  }
  for (auto& p : px) {
    if (p.x < start) p.x += W;
  }

  const geom::RotatedRect r = rotated ? geom::min_area_rect(px) : geom::bounding_rect(px);
  constexpr double kMinSide = 1e-6;
  return canonicalize_bbox({r.cx, r.cy, std::max(r.w, kMinSide), std::max(r.h, kMinSide), r.angle},
                           d);
}

double estimate_gamma(std::span<const Vec3> dirs, const Vec3& center) {
  const LonLat c = vec_to_sph(center);
  const Rotation to_local = view_rotation(c.lon, c.lat, 0.0).transposed();
  std::vector<geom::Point2> pts;
  pts.reserve(dirs.size());
  for (const auto& v : dirs) {
    const LonLat l = vec_to_sph(to_local * v);
    pts.push_back({l.lon, -l.lat});  // image-like axes: x right, y down
  }
  const geom::RotatedRect r = geom::min_area_rect(pts);
  double g = r.w > r.h ? r.angle : r.angle - kHalfPi;
  if (g <= -kHalfPi) g += kPi;
  if (g > kHalfPi) g -= kPi;
  return g;
}

Bfov fit_bfov_extents(std::span<const Vec3> dirs, const Vec3& center, double gamma, bool contain) {
  if (dirs.empty()) throw DomainError("cannot fit a BFoV to an empty point set");
  const LonLat c0 = vec_to_sph(center);
  const Rotation frame0 = view_rotation(c0.lon, c0.lat, gamma);
  const Rotation to0 = frame0.transposed();

  double lon_min = std::numeric_limits<double>::infinity(), lon_max = -lon_min;
  double lat_min = lon_min, lat_max = -lon_min;
  for (const auto& v : dirs) {
    const Vec3 l = to0 * v;
    const double lon = std::atan2(l.x, l.z);
    const double lat = std::asin(std::clamp(-l.y, -1.0, 1.0));
    lon_min = std::min(lon_min, lon);
    lon_max = std::max(lon_max, lon);
    lat_min = std::min(lat_min, lat);
    lat_max = std::max(lat_max, lat);
  }
  const LonLat mid{0.5 * (lon_min + lon_max), 0.5 * (lat_min + lat_max)};
  const LonLat c1 = vec_to_sph(frame0 * sph_to_vec(mid));

  // Symmetric extents in the frame the result will actually use.
  const Rotation to1 = view_rotation(c1.lon, c1.lat, gamma).transposed();
  double max_t = 0, max_p = 0, max_tx = 0, max_ty = 0;
  bool in_front = true;
  for (const auto& v : dirs) {
    const Vec3 l = to1 * v;
    max_t = std::max(max_t, std::abs(std::atan2(l.x, l.z)));
    max_p = std::max(max_p, std::abs(std::asin(std::clamp(-l.y, -1.0, 1.0))));
    if (l.z <= 1e-12) {
      in_front = false;
    } else {
      max_tx = std::max(max_tx, std::abs(l.x / l.z));
      max_ty = std::max(max_ty, std::abs(l.y / l.z));
    }
  }
  double theta = 2 * max_t, phi = 2 * max_p;
  if (contain && select_region_mode(theta, phi) == RegionMode::kTangent) {
    const double tt = in_front ? 2 * std::atan(max_tx) : kPi;
    const double tp = in_front ? 2 * std::atan(max_ty) : kPi;
    if (select_region_mode(tt, tp) == RegionMode::kTangent) {
      theta = tt;
      phi = tp;
    } else {
      // Only the spherical patch can hold these points at this size.
      theta = std::max(theta, kGateAngle);
    }
  }
  constexpr double kMinFov = 1e-9;
  return validate_bfov({c1.lon, c1.lat, std::clamp(theta, kMinFov, kTwoPi),
                        std::clamp(phi, kMinFov, kPi), gamma});
}

Bfov points_to_bfov(std::span<const LonLat> points, bool rotated, std::optional<double> gamma_hint,
                    bool contain) {
  if (points.empty()) throw DomainError("points_to_bfov needs at least one point");
  std::vector<Vec3> dirs;
  dirs.reserve(points.size());
  Vec3 sum;
  for (const auto& p : points) {
    dirs.push_back(sph_to_vec(p));
    sum += dirs.back();
  }
  // A balanced cloud (e.g. the whole sphere) has no centroid; use the origin.
  const Vec3 center = sum.norm() > 1e-9 * static_cast<double>(points.size())
                          ? normalized(sum)
                          : Vec3{0.0, 0.0, 1.0};
  double gamma = 0.0;
  if (rotated) gamma = gamma_hint ? *gamma_hint : estimate_gamma(dirs, center);
  return fit_bfov_extents(dirs, center, gamma, contain);
}

double grid_solid_angle(std::span<const Vec3> dirs, int width, int height) {
  check_grid_size(width, height);
  if (dirs.size() != static_cast<std::size_t>(width) * height) {
    throw DomainError("grid_solid_angle: direction count does not match the grid size");
  }
  auto at = [&](int i, int j) -> const Vec3& { return dirs[static_cast<std::size_t>(i) * width + j]; };
  double total = 0.0;
  for (int i = 0; i + 1 < height; ++i) {
    for (int j = 0; j + 1 < width; ++j) {
      total += spherical_triangle_area(at(i, j), at(i, j + 1), at(i + 1, j + 1));
      total += spherical_triangle_area(at(i, j), at(i + 1, j + 1), at(i + 1, j));
    }
  }
  return total;
}

std::vector<RowSpan> cap_spans(const ErpDims& grid, const Vec3& center, double radius) {
  const int W = grid.width(), H = grid.height();
  const LonLat c = vec_to_sph(center);
  // Half a cell diagonal of slack so rounding never drops a boundary cell.
  const double r = std::min(radius + kPi / H + 1e-9, kPi);
  const double cos_r = std::cos(r);
  const double sin_c = std::sin(c.lat), cos_c = std::cos(c.lat);
  std::vector<RowSpan> spans;
  spans.reserve(static_cast<std::size_t>(H));
  for (int i = 0; i < H; ++i) {
    const double lat = (0.5 - (i + 0.5) / H) * kPi;
    if (std::abs(lat - c.lat) > r) continue;
    const double den = std::cos(lat) * cos_c;
    double half = kPi;
    if (den > 1e-15) {
      const double q = (cos_r - std::sin(lat) * sin_c) / den;
      if (q > 1.0) continue;
      half = q <= -1.0 ? kPi : std::acos(q);
    }
    if (half >= kPi - 1e-12) {
      spans.push_back({i, 0, W});
      continue;
    }
    // Columns whose centers fall in [c.lon - half, c.lon + half], plus one.
    const double lo = ((c.lon - half) / kTwoPi + 0.5) * W - 0.5;
    const double hi = ((c.lon + half) / kTwoPi + 0.5) * W - 0.5;
    const int j_lo = static_cast<int>(std::floor(lo)) - 1;
    const int j_hi = static_cast<int>(std::ceil(hi)) + 1;
    const int count = j_hi - j_lo + 1;
    if (count >= W) {
      spans.push_back({i, 0, W});
    } else {
      spans.push_back({i, j_lo, count});
    }
  }
  return spans;
}

double raster_area(const RegionTest& test, const ErpDims& grid) {
  const int W = grid.width(), H = grid.height();
  const double dlon = kTwoPi / W;
  double area = 0.0;
  for (const RowSpan& s : cap_spans(grid, test.center(), test.cap_radius())) {
    const double lat = (0.5 - (s.row + 0.5) / H) * kPi;
    const double top = (0.5 - double(s.row) / H) * kPi;
    const double bot = (0.5 - double(s.row + 1) / H) * kPi;
    const double cell = dlon * (std::sin(top) - std::sin(bot));
    const double cl = std::cos(lat), sl = std::sin(lat);
    for (int k = 0; k < s.count; ++k) {
      const int j = static_cast<int>(wrap_mod(s.begin + k, W));
      const double lon = ((j + 0.5) / W - 0.5) * kTwoPi;
      if (test.contains({cl * std::sin(lon), -sl, cl * std::cos(lon)})) area += cell;
    }
  }
  return area;
}

}  // namespace omni
