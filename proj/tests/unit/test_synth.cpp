#include <doctest.h>

#include <unistd.h>

#include "omnitrack/dataset_io.hpp"
#include "omnitrack/errors.hpp"
#include "omnitrack/synth.hpp"
#include "oracles.hpp"

using namespace omni;

TEST_CASE("scenario strings") {
  const Scenario s = parse_scenario("seam:frames=40,radius=15,width=512");
  CHECK(s.trajectory == Trajectory::kSeam);
  CHECK(s.frames == 40);
  CHECK(s.radius_deg == 15);
  CHECK(s.height() == 256);
  CHECK(parse_scenario("grow").trajectory == Trajectory::kGrow);
  CHECK(parse_scenario("greatcircle:tilt=-20,lon=90").tilt_deg == -20);
  CHECK_THROWS_AS(parse_scenario("spiral"), ValidationError);
  CHECK_THROWS_AS(parse_scenario("equator:frames"), ValidationError);
  CHECK_THROWS_AS(parse_scenario("equator:colour=3"), ValidationError);
  CHECK_THROWS_AS(parse_scenario("equator:frames=2.5"), ValidationError);
  CHECK_THROWS_AS(parse_scenario("equator:width=1001"), ValidationError);
  CHECK_THROWS_AS(parse_scenario("grow:grow_until=0"), ValidationError);
}

TEST_CASE("trajectories") {
  Scenario eq = parse_scenario("equator:lat=-30,speed=2,lon=170");
  CHECK(oracle::deg(truth_at(eq, 1).lon) == doctest::Approx(170));
  CHECK(oracle::deg(truth_at(eq, 6).lon) == doctest::Approx(-180));
  CHECK(oracle::deg(truth_at(eq, 9).lat) == doctest::Approx(-30));

  const Scenario gc = parse_scenario("greatcircle:tilt=40,speed=1.5");
  const TruthDisk a = truth_at(gc, 1), b = truth_at(gc, 2), c = truth_at(gc, 50);
  const oracle::V3 pa = oracle::dir(a.lon, a.lat), pb = oracle::dir(b.lon, b.lat), pc = oracle::dir(c.lon, c.lat);
  CHECK(oracle::deg(oracle::haversine(a.lon, a.lat, b.lon, b.lat)) == doctest::Approx(1.5));
  CHECK(std::abs(oracle::dot(oracle::cross(pa, pb), pc)) < 1e-9);
  double top = 0;
  for (int t = 1; t <= 400; ++t) top = std::max(top, oracle::deg(truth_at(gc, t).lat));
  CHECK(top == doctest::Approx(40).epsilon(1e-3));

  const Scenario ls = parse_scenario("latsweep:frames=11,lat=-20,end_lat=80");
  CHECK(oracle::deg(truth_at(ls, 1).lat) == doctest::Approx(-20));
  CHECK(oracle::deg(truth_at(ls, 11).lat) == doctest::Approx(80));

  const Scenario pl = parse_scenario("pole:frames=21,end_lat=85");
  CHECK(oracle::deg(truth_at(pl, 11).lat) == doctest::Approx(85));
  CHECK(oracle::deg(truth_at(pl, 21).lat) == doctest::Approx(0).epsilon(1e-9));

  const Scenario gr = parse_scenario("grow:frames=11,radius=20,end_radius=75,grow_until=0.5");
  CHECK(oracle::deg(truth_at(gr, 1).radius) == doctest::Approx(20));
  CHECK(oracle::deg(truth_at(gr, 6).radius) == doctest::Approx(75));
  CHECK(oracle::deg(truth_at(gr, 11).radius) == doctest::Approx(75));
  CHECK(oracle::deg(truth_at(gr, 3).radius) == doctest::Approx(42));
}

TEST_CASE("rendered mask is the geodesic disk") {
  const Scenario s = parse_scenario("equator:width=256,radius=25");
  const Renderer r(s);
  const TruthDisk disk{deg2rad(175), deg2rad(40), deg2rad(25)};
  const RenderedFrame f = r.render(disk);
  const ErpDims& d = f.mask.dims();
  const double half_px = oracle::rad(360.0 / 256) * 0.75;
  int wrong = 0;
  for (int row = 0; row < d.height(); ++row) {
    for (int col = 0; col < d.width(); ++col) {
      const auto [lon, lat] = oracle::erp_lonlat(col + 0.5, row + 0.5, 256, 128);
      const double dist = oracle::haversine(lon, lat, disk.lon, disk.lat);
      const bool inside = dist <= disk.radius;
      if (inside != f.mask.at(row, col) && std::abs(dist - disk.radius) > half_px) ++wrong;
    }
  }
  CHECK(wrong == 0);
  CHECK(f.image.width() == 256);
  CHECK(f.image.channels() == 3);
}

TEST_CASE("generated sequence directory") {
  const fs::path dir = fs::temp_directory_path() / ("omnitrack_syn_" + std::to_string(getpid()));
  fs::remove_all(dir);
  const Scenario s = parse_scenario("seam:frames=6,width=256,radius=15");
  generate(s, dir, 2);
  const SequenceLayout seq(dir);
  CHECK(seq.meta().frames == 6);
  CHECK(seq.meta().dims() == ErpDims(256, 128));
  CHECK(fs::exists(seq.frame_path(6)));
  const auto anns = seq.load_annotations();
  REQUIRE(anns.size() == 6);
  const auto truth = read_truth(seq.truth_path());
  REQUIRE(truth.size() == 6);
  for (int t = 1; t <= 6; ++t) {
    const TruthDisk e = truth_at(s, t);
    CHECK(std::abs(oracle::deg(wrap_lon(truth[t - 1].lon - e.lon))) < 1e-5);
    REQUIRE(anns[t - 1].bfov);
    const Bfov& f = *anns[t - 1].bfov;
    CHECK(oracle::deg(oracle::haversine(f.clon, f.clat, e.lon, e.lat)) < 2.0);
    CHECK(anns[t - 1].rbbox);
  }
  CHECK_THROWS_AS(read_truth(dir / "nothing.txt"), IoError);
  fs::remove_all(dir);
}
