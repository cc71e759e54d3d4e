#include <doctest.h>

#include <random>

#include "omnitrack/errors.hpp"
#include "omnitrack/geometry2d.hpp"
#include "oracles.hpp"

using namespace omni;
using namespace omni::geom;

TEST_CASE("min-area rectangle against an orientation scan") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> ang(0, oracle::kPi), stretch(0.2, 5);
  for (int trial = 0; trial < 100; ++trial) {
    const double a = ang(rng), sx = stretch(rng), sy = stretch(rng);
    std::vector<Point2> pts;
    std::vector<oracle::Pt> ref;
    for (int i = 0; i < 60; ++i) {
      const double x = n(rng) * sx, y = n(rng) * sy;
      const Point2 p{std::cos(a) * x - std::sin(a) * y + 10, std::sin(a) * x + std::cos(a) * y - 3};
      pts.push_back(p);
      ref.push_back({p.x, p.y});
    }
    const RotatedRect r = min_area_rect(pts);
    const double scan = oracle::rotation_scan_min_area(ref, oracle::rad(0.05));
    CHECK(r.area() <= scan * (1 + 1e-9));
    CHECK(r.area() >= scan * 0.99);
    CHECK(r.angle > -oracle::kPi / 2);
    CHECK(r.angle <= oracle::kPi / 2);
    for (const Point2& p : pts) CHECK(rect_contains(r, p, 1e-7));
  }
}

TEST_CASE("min-area rectangle special inputs") {
  const std::vector<Point2> square{{0, 0}, {2, 0}, {2, 2}, {0, 2}, {1, 1}};
  RotatedRect r = min_area_rect(square);
  CHECK(r.area() == doctest::Approx(4));
  CHECK(r.angle == doctest::Approx(0).epsilon(1e-12));
  const std::vector<Point2> diamond{{0, 1}, {1, 0}, {2, 1}, {1, 2}};
  r = min_area_rect(diamond);
  CHECK(r.area() == doctest::Approx(2));
  CHECK(std::abs(r.angle) == doctest::Approx(oracle::kPi / 4));
  const std::vector<Point2> line{{0, 0}, {1, 1}, {3, 3}};
  r = min_area_rect(line);
  CHECK(r.area() == doctest::Approx(0).epsilon(1e-12));
  CHECK(std::max(r.w, r.h) == doctest::Approx(std::sqrt(18.0)));
  const std::vector<Point2> one{{4, 5}};
  r = min_area_rect(one);
  CHECK(r.cx == 4);
  CHECK(r.cy == 5);
  CHECK_THROWS_AS(min_area_rect(std::vector<Point2>{}), DomainError);
}

TEST_CASE("hull, area and clipping") {
  const std::vector<Point2> pts{{0, 0}, {4, 0}, {4, 4}, {0, 4}, {2, 2}, {1, 3}, {2, 0}};
  const auto hull = convex_hull(pts);
  CHECK(hull.size() == 4);
  CHECK(polygon_area(hull) == doctest::Approx(16));
  const auto a = rect_corners({0, 0, 2, 2, 0});
  const auto b = rect_corners({1, 1, 2, 2, 0});
  CHECK(std::abs(polygon_area(clip_convex(a, b))) == doctest::Approx(1));
  const auto c = rect_corners({10, 10, 2, 2, 0});
  CHECK(clip_convex(a, c).empty());
  const RotatedRect br = bounding_rect(pts);
  CHECK(br.w == 4);
  CHECK(br.h == 4);
  CHECK(br.cx == 2);
}
