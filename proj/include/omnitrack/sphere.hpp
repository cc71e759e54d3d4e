#pragma once

// Spherical camera model for equirectangular (ERP) images.
//
// Camera frame: +Z forward, +X right, +Y down. A direction with longitude
// `lon` and latitude `lat` maps to
//   (cos(lat) sin(lon), -sin(lat), cos(lat) cos(lon)).
// ERP pixel coordinates are continuous; u = 0 is the left edge of column 0
// and v = 0 the top edge of row 0, so the center of pixel (0, 0) sits at
// (0.5, 0.5).

#include <array>
#include <cmath>
#include <numbers>

namespace omni {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kHalfPi = 0.5 * std::numbers::pi;

constexpr double deg2rad(double deg) { return deg * (kPi / 180.0); }
constexpr double rad2deg(double rad) { return rad * (180.0 / kPi); }

/// Wraps an angle into [-pi, pi).
double wrap_lon(double lon);

/// Wraps x into [0, period).
double wrap_mod(double x, double period);

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr bool operator==(const Vec3&) const = default;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

/// Unit-length copy of v. Throws DomainError for the zero vector.
Vec3 normalized(const Vec3& v);

/// Proper rotation in 3D, row-major.
class Rotation {
 public:
  constexpr Rotation() : m_{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}} {}
  constexpr explicit Rotation(const std::array<std::array<double, 3>, 3>& m) : m_(m) {}

  constexpr double operator()(int r, int c) const { return m_[r][c]; }

  constexpr Vec3 operator*(const Vec3& v) const {
    return {m_[0][0] * v.x + m_[0][1] * v.y + m_[0][2] * v.z,
            m_[1][0] * v.x + m_[1][1] * v.y + m_[1][2] * v.z,
            m_[2][0] * v.x + m_[2][1] * v.y + m_[2][2] * v.z};
  }

  constexpr Rotation operator*(const Rotation& o) const {
    std::array<std::array<double, 3>, 3> out{};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        out[r][c] = m_[r][0] * o.m_[0][c] + m_[r][1] * o.m_[1][c] + m_[r][2] * o.m_[2][c];
      }
    }
    return Rotation(out);
  }

  /// Inverse of a rotation is its transpose.
  constexpr Rotation transposed() const {
    std::array<std::array<double, 3>, 3> out{};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) out[r][c] = m_[c][r];
    }
    return Rotation(out);
  }

  double determinant() const;

 private:
  std::array<std::array<double, 3>, 3> m_;
};

/// Rotation about +Y by `a` radians; maps +Z toward +X.
Rotation rot_y(double a);
/// Rotation about +X by `a` radians; maps +Z toward -Y (upward).
Rotation rot_x(double a);
/// Rotation about +Z by `a` radians; maps +X toward +Y.
Rotation rot_z(double a);

/// A direction on the unit sphere. lon in [-pi, pi), lat in [-pi/2, pi/2].
struct LonLat {
  double lon = 0.0;
  double lat = 0.0;
};

struct PixCoord {
  double u = 0.0;
  double v = 0.0;
};

/// Equirectangular frame size. Construction enforces W = 2H.
class ErpDims {
 public:
  ErpDims(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  bool operator==(const ErpDims&) const = default;

 private:
  int width_;
  int height_;
};

PixCoord sph_to_pix(const LonLat& p, const ErpDims& d);
/// Throws DomainError when v lies outside [0, H].
LonLat pix_to_sph(const PixCoord& q, const ErpDims& d);

Vec3 sph_to_vec(const LonLat& p);
/// Normalizes first; throws DomainError for the zero vector.
LonLat vec_to_sph(const Vec3& v);

/// Great-circle angle in radians, in [0, pi].
double angular_distance(const LonLat& a, const LonLat& b);
double angular_distance(const Vec3& a, const Vec3& b);

/// R_y(clon) * R_x(clat) * R_z(gamma): carries the forward axis onto the
/// given center and the local +X axis onto the rotated horizontal.
Rotation view_rotation(double clon, double clat, double gamma);

}  // namespace omni
