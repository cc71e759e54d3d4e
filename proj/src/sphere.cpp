#include "omnitrack/sphere.hpp"

#include <algorithm>
#include <string>

#include "omnitrack/errors.hpp"

namespace omni {

double wrap_mod(double x, double period) {
  double r = std::fmod(x, period);
  if (r < 0.0) r += period;
  // fmod of a tiny negative value can round up to exactly `period`.
  if (r >= period) r = 0.0;
  return r;
}

double wrap_lon(double lon) {
  double r = wrap_mod(lon + kPi, kTwoPi) - kPi;
  if (r >= kPi) r = -kPi;
  return r;
}

Vec3 normalized(const Vec3& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw DomainError("cannot normalize a zero or non-finite vector");
  }
  return v * (1.0 / n);
}

double Rotation::determinant() const {
  const auto& m = m_;
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

Rotation rot_y(double a) {
  const double c = std::cos(a), s = std::sin(a);
  return Rotation({{{c, 0, s}, {0, 1, 0}, {-s, 0, c}}});
}

Rotation rot_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  return Rotation({{{1, 0, 0}, {0, c, -s}, {0, s, c}}});
}

Rotation rot_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  return Rotation({{{c, -s, 0}, {s, c, 0}, {0, 0, 1}}});
}

ErpDims::ErpDims(int width, int height) : width_(width), height_(height) {
  if (width < 2 || width != 2 * height) {
    throw ValidationError("ERP dims must satisfy W = 2H and W >= 2, got " + std::to_string(width) +
                          "x" + std::to_string(height));
  }
}

PixCoord sph_to_pix(const LonLat& p, const ErpDims& d) {
  const double w = d.width(), h = d.height();
  const double u = wrap_mod((p.lon / kTwoPi + 0.5) * w, w);
  const double v = (-p.lat / kPi + 0.5) * h;
  return {u, v};
}

LonLat pix_to_sph(const PixCoord& q, const ErpDims& d) {
  const double w = d.width(), h = d.height();
  if (!(q.v >= 0.0 && q.v <= h) || !std::isfinite(q.u)) {
    throw DomainError("pixel v=" + std::to_string(q.v) + " outside [0, " + std::to_string(h) + "]");
  }
  const double lon = wrap_lon((q.u / w - 0.5) * kTwoPi);
  const double lat = std::clamp((0.5 - q.v / h) * kPi, -kHalfPi, kHalfPi);
  return {lon, lat};
}

Vec3 sph_to_vec(const LonLat& p) {
  const double cl = std::cos(p.lat);
  return {cl * std::sin(p.lon), -std::sin(p.lat), cl * std::cos(p.lon)};
}

LonLat vec_to_sph(const Vec3& v) {
  const Vec3 n = normalized(v);
  const double lon = wrap_lon(std::atan2(n.x, n.z));
  const double lat = std::atan2(-n.y, std::hypot(n.x, n.z));
  return {lon, std::clamp(lat, -kHalfPi, kHalfPi)};
}

double angular_distance(const Vec3& a, const Vec3& b) {
  // atan2 form stays accurate near 0 and pi where acos loses digits.
  return std::atan2(cross(a, b).norm(), dot(a, b));
}

double angular_distance(const LonLat& a, const LonLat& b) {
  return angular_distance(sph_to_vec(a), sph_to_vec(b));
}

Rotation view_rotation(double clon, double clat, double gamma) {
  return rot_y(clon) * rot_x(clat) * rot_z(gamma);
}

}  // namespace omni
