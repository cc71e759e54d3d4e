#pragma once

// Test-side reference computations. Written from first principles and kept
// free of library calls so they can check the library rather than echo it.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

constexpr double kPi = 3.14159265358979323846;

inline double rad(double deg) { return deg * kPi / 180.0; }
inline double deg(double r) { return r * 180.0 / kPi; }

struct V3 {
  double x = 0, y = 0, z = 0;
};

inline double dot(const V3& a, const V3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline V3 cross(const V3& a, const V3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

// +Z forward, +X right, +Y down; latitude positive up.
inline V3 dir(double lon, double lat) {
  return {std::cos(lat) * std::sin(lon), -std::sin(lat), std::cos(lat) * std::cos(lon)};
}

inline std::pair<double, double> erp_uv(double lon, double lat, int W, int H) {
  return {(lon / (2 * kPi) + 0.5) * W, (0.5 - lat / kPi) * H};
}

inline std::pair<double, double> erp_lonlat(double u, double v, int W, int H) {
  return {(u / W - 0.5) * 2 * kPi, (0.5 - v / H) * kPi};
}

inline double haversine(double lon1, double lat1, double lon2, double lat2) {
  const double a = std::pow(std::sin((lat2 - lat1) / 2), 2) +
                   std::cos(lat1) * std::cos(lat2) * std::pow(std::sin((lon2 - lon1) / 2), 2);
  return 2 * std::asin(std::min(1.0, std::sqrt(a)));
}

// Solid angle of the gnomonic rectangle with full angles theta x phi.
inline double tangent_solid_angle(double theta, double phi) {
  return 4 * std::asin(std::sin(theta / 2) * std::sin(phi / 2));
}

// Area of the longitude/latitude patch theta x phi centered on the equator.
inline double sphere_patch_area(double theta, double phi) { return 2 * theta * std::sin(phi / 2); }

// Unrotated BFoV membership built from a right/down/forward basis.
struct Region {
  V3 f, e, d;
  double theta, phi;
  bool tangent;

  Region(double clon, double clat, double th, double ph, bool tan_mode)
      : f(dir(clon, clat)), e{std::cos(clon), 0.0, -std::sin(clon)}, theta(th), phi(ph),
        tangent(tan_mode) {
    d = cross(f, e);
  }

  bool contains(const V3& v) const {
    const double x = dot(v, e), y = dot(v, d), z = dot(v, f);
    if (tangent) {
      if (z <= 0) return false;
      return std::abs(x / z) <= std::tan(theta / 2) && std::abs(y / z) <= std::tan(phi / 2);
    }
    const double lon = std::atan2(x, z), lat = std::asin(std::clamp(-y, -1.0, 1.0));
    return std::abs(lon) <= theta / 2 && std::abs(lat) <= phi / 2;
  }
};

inline bool gate_tangent(double theta, double phi) { return theta < rad(90) && phi < rad(90); }

inline V3 random_dir(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  for (;;) {
    V3 v{n(rng), n(rng), n(rng)};
    const double r = std::sqrt(dot(v, v));
    if (r > 1e-9) return {v.x / r, v.y / r, v.z / r};
  }
}

// Monte-Carlo IoU of two regions on the sphere.
inline double mc_iou(const Region& a, const Region& b, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  long ia = 0, ib = 0, both = 0;
  for (int i = 0; i < samples; ++i) {
    const V3 v = random_dir(rng);
    const bool ina = a.contains(v), inb = b.contains(v);
    ia += ina;
    ib += inb;
    both += ina && inb;
  }
  const long uni = ia + ib - both;
  return uni ? double(both) / double(uni) : 0.0;
}

// Monte-Carlo area (sr) of a region.
template <class Fn>
double mc_area(Fn&& contains, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  long in = 0;
  for (int i = 0; i < samples; ++i) in += contains(random_dir(rng)) ? 1 : 0;
  return 4 * kPi * double(in) / samples;
}

// Narrowest axis-aligned width (in pixels, pixel squares) of the set columns
// over every circular shift of the image.
inline int brute_min_width(const std::vector<std::uint8_t>& mask, int W, int H) {
  std::vector<bool> col(static_cast<std::size_t>(W), false);
  for (int r = 0; r < H; ++r) {
    for (int c = 0; c < W; ++c) {
      if (mask[static_cast<std::size_t>(r) * W + c]) col[c] = true;
    }
  }
  int best = std::numeric_limits<int>::max();
  for (int k = 0; k < W; ++k) {
    int lo = W, hi = -1;
    for (int c = 0; c < W; ++c) {
      if (!col[c]) continue;
      const int s = (c + k) % W;
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    if (hi >= 0) best = std::min(best, hi - lo + 1);
  }
  return best;
}

struct Pt {
  double x, y;
};

// Minimum-area enclosing rectangle by scanning orientations in `step` radians.
inline double rotation_scan_min_area(const std::vector<Pt>& pts, double step) {
  double best = std::numeric_limits<double>::infinity();
  for (double a = 0; a < kPi / 2; a += step) {
    const double c = std::cos(a), s = std::sin(a);
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const Pt& p : pts) {
      const double x = c * p.x + s * p.y, y = -s * p.x + c * p.y;
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
    best = std::min(best, (x1 - x0) * (y1 - y0));
  }
  return best;
}

// Axis-aligned IoU of center-format boxes.
inline double box_iou(double cx1, double cy1, double w1, double h1, double cx2, double cy2, double w2,
                      double h2) {
  const double ix = std::max(0.0, std::min(cx1 + w1 / 2, cx2 + w2 / 2) - std::max(cx1 - w1 / 2, cx2 - w2 / 2));
  const double iy = std::max(0.0, std::min(cy1 + h1 / 2, cy2 + h2 / 2) - std::max(cy1 - h1 / 2, cy2 - h2 / 2));
  const double inter = ix * iy;
  return inter / (w1 * h1 + w2 * h2 - inter);
}

// Sample-based IoU of two rotated rectangles on a dense lattice.
inline double lattice_rect_iou(const std::array<double, 5>& a, const std::array<double, 5>& b, int n) {
  auto inside = [](const std::array<double, 5>& r, double x, double y) {
    const double c = std::cos(r[4]), s = std::sin(r[4]);
    const double dx = x - r[0], dy = y - r[1];
    return std::abs(c * dx + s * dy) <= r[2] / 2 && std::abs(-s * dx + c * dy) <= r[3] / 2;
  };
  const double ra = std::hypot(a[2], a[3]) / 2, rb = std::hypot(b[2], b[3]) / 2;
  const double x0 = std::min(a[0] - ra, b[0] - rb), x1 = std::max(a[0] + ra, b[0] + rb);
  const double y0 = std::min(a[1] - ra, b[1] - rb), y1 = std::max(a[1] + ra, b[1] + rb);
  long ia = 0, ib = 0, both = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x = x0 + (x1 - x0) * (j + 0.5) / n, y = y0 + (y1 - y0) * (i + 0.5) / n;
      const bool p = inside(a, x, y), q = inside(b, x, y);
      ia += p;
      ib += q;
      both += p && q;
    }
  }
  return double(both) / double(ia + ib - both);
}

}  // namespace oracle
