#include <doctest.h>

#include <random>

#include "omnitrack/errors.hpp"
#include "omnitrack/mask_convert.hpp"
#include "omnitrack/region.hpp"
#include "mask_fixtures.hpp"
#include "oracles.hpp"

using namespace omni;

using namespace fixtures;

TEST_CASE("segments join across the seam") {
  const ErpDims d(64, 32);
  Mask m(d);
  m.set(10, 0, true);
  m.set(10, 63, true);
  m.set(20, 30, true);
  const MaskSegments s = label_segments(m);
  CHECK(s.sizes.size() == 2);
  CHECK(s.label[10 * 64] == s.label[10 * 64 + 63]);
  CHECK(s.sizes[s.largest] == 2);
  CHECK_FALSE(mask_to_bbox(Mask(d), false));
  CHECK_FALSE(mask_to_bfov(Mask(d), true));
}

TEST_CASE("pixel solid angles sum to the sphere") {
  const ErpDims d(128, 64);
  double total = 0;
  for (int r = 0; r < 64; ++r) total += pixel_solid_angle(r, d) * 128;
  CHECK(total == doctest::Approx(4 * kPi).epsilon(1e-12));
}

TEST_CASE("rotating a mask by the identity keeps it") {
  const ErpDims d(128, 64);
  const Mask m = disk_mask(d, 30, 20, 15);
  CHECK(rotate_mask(m, Rotation{}).bits() == m.bits());
}

TEST_CASE("containment over randomized masks") {
  std::mt19937_64 rng(2024);
  const ErpDims d(256, 128);
  int low = 0;
  for (int k = 0; k < 200; ++k) {
    const Mask m = random_mask(rng, d, k);
    if (m.empty()) continue;
    const auto c0 = coverage(m);
    REQUIRE(c0);
    const Coverage c = *c0;
    const bool ok = c.bbox >= 0.999 && c.rbbox >= 0.999 && c.bfov >= 0.999 && c.rbfov >= 0.999;
    if (!ok) {
      ++low;
      MESSAGE("mask " << k << ": " << c.bbox << ' ' << c.rbbox << ' ' << c.bfov << ' ' << c.rbfov);
    }
  }
  CHECK(low == 0);
}

TEST_CASE("axis-aligned width against every circular shift") {
  std::mt19937_64 rng(77);
  const ErpDims d(256, 128);
  for (int k = 0; k < 200; ++k) {
    const Mask m = random_mask(rng, d, k);
    if (m.empty()) continue;
    const auto b = mask_to_bbox(m, false);
    REQUIRE(b);
    const int ref = oracle::brute_min_width(m.bits(), d.width(), d.height());
    CHECK(b->w <= ref + 1 + 1e-9);
    CHECK(b->w >= ref - 1e-9);
    CHECK(b->gamma == 0.0);
  }
}

TEST_CASE("rotated box against the rotation scan") {
  std::mt19937_64 rng(5);
  const ErpDims d(256, 128);
  std::uniform_real_distribution<double> lon(-120, 120), lat(-50, 50), g(-90, 90), ext(6, 30);
  for (int k = 0; k < 60; ++k) {
    const Mask m = patch_mask(d, lon(rng), lat(rng), ext(rng), ext(rng) / 3, g(rng));
    const auto b = mask_to_bbox(m, true);
    REQUIRE(b);
    std::vector<oracle::Pt> corners;
    for (int r = 0; r < d.height(); ++r) {
      for (int c = 0; c < d.width(); ++c) {
        if (!m.at(r, c)) continue;
        for (int dy = 0; dy < 2; ++dy) {
          for (int dx = 0; dx < 2; ++dx) corners.push_back({double(c + dx), double(r + dy)});
        }
      }
    }
    const double scan = oracle::rotation_scan_min_area(corners, oracle::rad(0.5));
    CHECK(b->w * b->h <= scan * 1.01);
    CHECK(b->w * b->h >= scan * 0.98);
  }
}

TEST_CASE("disk masks give square fields of view") {
  const ErpDims d(1024, 512);
  for (auto [lon, lat, rad] : {std::tuple{0.0, 0.0, 20.0}, {179.0, 30.0, 25.0}, {-60.0, -75.0, 10.0}, {10.0, 20.0, 60.0}}) {
    const Mask m = disk_mask(d, lon, lat, rad);
    const auto f = mask_to_bfov(m, false);
    REQUIRE(f);
    const double px = 360.0 / 1024;
    CHECK(rad2deg(angular_distance(f->center(), LonLat{deg2rad(lon), deg2rad(lat)})) < 2 * px);
    CHECK(rad2deg(f->theta) == doctest::Approx(2 * rad).epsilon(3 * px / (2 * rad)));
    CHECK(rad2deg(f->phi) == doctest::Approx(2 * rad).epsilon(3 * px / (2 * rad)));
  }
}

TEST_CASE("rotated field of view recovers the roll") {
  const ErpDims d(1024, 512);
  for (double g : {-50.0, -15.0, 25.0, 70.0}) {
    const Mask m = patch_mask(d, 30, 15, 25, 8, g);
    const auto f = mask_to_bfov(m, true);
    REQUIRE(f);
    CHECK(std::abs(std::remainder(rad2deg(f->gamma) - g, 180.0)) < 1.5);
    CHECK(rad2deg(std::max(f->theta, f->phi)) == doctest::Approx(50).epsilon(0.03));
    CHECK(rad2deg(std::min(f->theta, f->phi)) == doctest::Approx(16).epsilon(0.06));
    const auto u = mask_to_bfov(m, false);
    CHECK(u->gamma == 0.0);
  }
}
