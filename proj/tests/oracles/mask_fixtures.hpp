#pragma once

// Synthetic masks on the ERP grid and the fraction of mask pixels each
// converter output covers.

#include <optional>
#include <random>
#include <tuple>

#include "omnitrack/mask_convert.hpp"
#include "omnitrack/region.hpp"

namespace fixtures {

using namespace omni;

inline Mask disk_mask(const ErpDims& d, double lon, double lat, double radius) {
  Mask m(d);
  const Vec3 c = sph_to_vec({deg2rad(lon), deg2rad(lat)});
  const double cr = std::cos(deg2rad(radius));
  for (int r = 0; r < d.height(); ++r) {
    for (int col = 0; col < d.width(); ++col) {
      if (dot(pixel_dir(r, col, d), c) >= cr) m.set(r, col, true);
    }
  }
  return m;
}

// Gnomonic rectangle seen from (lon, lat), rolled by gamma.
inline Mask patch_mask(const ErpDims& d, double lon, double lat, double half_x, double half_y, double gamma) {
  Mask m(d);
  const Rotation to_local = view_rotation(deg2rad(lon), deg2rad(lat), deg2rad(gamma)).transposed();
  const double tx = std::tan(deg2rad(half_x)), ty = std::tan(deg2rad(half_y));
  for (int r = 0; r < d.height(); ++r) {
    for (int col = 0; col < d.width(); ++col) {
      const Vec3 l = to_local * pixel_dir(r, col, d);
      if (l.z > 0 && std::abs(l.x / l.z) <= tx && std::abs(l.y / l.z) <= ty) m.set(r, col, true);
    }
  }
  return m;
}

inline bool box_has(const Bbox& b, double u, double v, double W) {
  const double c = std::cos(b.gamma), s = std::sin(b.gamma);
  for (double shift : {0.0, -W, W}) {
    const double dx = u + shift - b.cx, dy = v - b.cy;
    if (std::abs(c * dx + s * dy) <= b.w / 2 + 1e-6 && std::abs(-s * dx + c * dy) <= b.h / 2 + 1e-6) return true;
  }
  return false;
}

struct Coverage {
  double bbox, rbbox, bfov, rbfov;
};

inline std::optional<Coverage> coverage(const Mask& m) {
  const ErpDims& d = m.dims();
  const auto bb = mask_to_bbox(m, false), rb = mask_to_bbox(m, true);
  const auto bf = mask_to_bfov(m, false), rf = mask_to_bfov(m, true);
  if (!bb || !rb || !bf || !rf) return std::nullopt;
  const RegionTest tf(*bf, select_region_mode(bf->theta, bf->phi));
  const RegionTest tr(*rf, select_region_mode(rf->theta, rf->phi));
  std::size_t n = 0, a = 0, b = 0, c = 0, e = 0;
  for (int r = 0; r < d.height(); ++r) {
    for (int col = 0; col < d.width(); ++col) {
      if (!m.at(r, col)) continue;
      ++n;
      a += box_has(*bb, col + 0.5, r + 0.5, d.width());
      b += box_has(*rb, col + 0.5, r + 0.5, d.width());
      const Vec3 v = pixel_dir(r, col, d);
      c += tf.contains(v);
      e += tr.contains(v);
    }
  }
  const double N = double(n);
  return Coverage{a / N, b / N, c / N, e / N};
}

inline Mask random_mask(std::mt19937_64& rng, const ErpDims& d, int kind) {
  std::uniform_real_distribution<double> lon(-180, 180), lat(-60, 60), rad(3, 40), g(-90, 90);
  switch (kind % 5) {
    case 0: return disk_mask(d, lon(rng), lat(rng), rad(rng));
    case 1: return disk_mask(d, 180 - std::uniform_real_distribution<double>(-10, 10)(rng), lat(rng), rad(rng));
    case 2: return disk_mask(d, lon(rng), (kind % 2 ? 1 : -1) * std::uniform_real_distribution<double>(70, 90)(rng), rad(rng));
    case 3: return patch_mask(d, lon(rng), lat(rng), rad(rng), rad(rng) / 2, g(rng));
    default: {
      Mask m = patch_mask(d, 175, lat(rng), rad(rng), 8, g(rng));
      const Mask extra = disk_mask(d, lon(rng), lat(rng), 4);
      for (int r = 0; r < d.height(); ++r) {
        for (int c = 0; c < d.width(); ++c) {
          if (extra.at(r, c)) m.set(r, c, true);
        }
      }
      return m;
    }
  }
}

}  // namespace fixtures
