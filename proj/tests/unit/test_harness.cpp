#include <doctest.h>

#include <chrono>
#include <sstream>
#include <unistd.h>

#include "omnitrack/adapter.hpp"
#include "omnitrack/errors.hpp"
#include "omnitrack/harness.hpp"
#include "omnitrack/oracle.hpp"
#include "omnitrack/synth.hpp"

using namespace omni;
namespace fs = std::filesystem;

namespace {

Bfov fov_deg(double clon, double clat, double th, double ph, double g = 0) {
  return {deg2rad(clon), deg2rad(clat), deg2rad(th), deg2rad(ph), deg2rad(g)};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("omnitrack_h_" + std::to_string(getpid()) + "_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

FrameSource blank_frames(const ErpDims& d, int n) {
  return {d, n, [d](int) { return Image(d.width(), d.height(), 3, 128); }};
}

TruthDisk disk_at(int t) { return {deg2rad(-30.0 + 1.5 * t), deg2rad(10.0), deg2rad(15.0)}; }

// Answers with the analytic target seen through the region in the sidecar.
class SidecarOracle : public TrackerAdapter {
 public:
  explicit SidecarOracle(fs::path sidecar) : sidecar_(std::move(sidecar)) {}
  std::string hello() override { return "sidecar-oracle"; }
  void init(const Image&, const Bbox&) override {}
  TrackResult track(const Image&) override {
    const SearchSidecar s = read_sidecar(sidecar_);
    return {disk_local_box(disk_at(s.frame), s.region()), 1.0};
  }

 private:
  fs::path sidecar_;
};

class FixedAdapter : public TrackerAdapter {
 public:
  std::string hello() override { return "fixed"; }
  void init(const Image&, const Bbox& b) override { box_ = b; }
  TrackResult track(const Image&) override {
    ++calls;
    if (calls == fail_on) throw AdapterError("scripted failure");
    return {box_, 0.5};
  }
  int calls = 0;
  int fail_on = -1;

 private:
  Bbox box_;
};

FrameAnnotation init_at(const Bfov& f) {
  FrameAnnotation a;
  a.frame = 1;
  a.bfov = f;
  return a;
}

}  // namespace

TEST_CASE("search region scaling and clamps") {
  HarnessConfig cfg;
  Bfov s = search_region(fov_deg(10, 20, 40, 10, 30), cfg);
  CHECK(rad2deg(s.theta) == doctest::Approx(80));
  CHECK(rad2deg(s.phi) == doctest::Approx(30));
  CHECK(s.gamma == 0.0);
  CHECK(s.clon == doctest::Approx(deg2rad(10)));
  s = search_region(fov_deg(0, 0, 300, 120), cfg);
  CHECK(rad2deg(s.theta) == doctest::Approx(360));
  CHECK(rad2deg(s.phi) == doctest::Approx(180));
  cfg.mode = ModeOverride::kForceTangent;
  s = search_region(fov_deg(0, 0, 300, 120), cfg);
  CHECK(rad2deg(s.theta) == doctest::Approx(179));
  CHECK(rad2deg(s.phi) == doctest::Approx(179));
  HarnessConfig bad;
  bad.context_scale = 0.5;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("initial BFoV from a box") {
  const ErpDims d(2048, 1024);
  const Bbox b{1024, 512, 2048.0 * 40 / 360, 1024.0 * 30 / 180, 0};
  const Bfov f = bbox_to_init_bfov(b, d);
  CHECK(rad2deg(f.clon) == doctest::Approx(0).epsilon(1e-6));
  CHECK(rad2deg(f.theta) == doctest::Approx(40).epsilon(0.01));
  CHECK(f.phi == doctest::Approx(2 * std::atan(std::tan(deg2rad(15)) / std::cos(deg2rad(20)))).epsilon(0.01));
  FrameAnnotation a;
  a.bbox = b;
  CHECK(init_bfov(a, d).theta == doctest::Approx(f.theta));
  CHECK_THROWS_AS(init_bfov(FrameAnnotation{}, d), ValidationError);
}

TEST_CASE("perfect local answers track the analytic target") {
  const fs::path dir = scratch("oracle");
  const ErpDims d(1024, 512);
  HarnessConfig cfg;
  cfg.sidecar = dir / "sidecar.json";
  SidecarOracle adapter(cfg.sidecar);
  const TruthDisk t1 = disk_at(1);
  const auto steps = run_ope(blank_frames(d, 30), init_at({t1.lon, t1.lat, 2 * t1.radius, 2 * t1.radius, 0}), cfg, adapter);
  REQUIRE(steps.size() == 30);
  for (const TrackStep& s : steps) {
    CHECK_FALSE(s.failed);
    const TruthDisk t = disk_at(s.frame);
    CHECK(rad2deg(angular_distance(s.bfov.center(), LonLat{t.lon, t.lat})) < 0.05);
    CHECK(rad2deg(s.bfov.theta) == doctest::Approx(30).epsilon(0.01));
    CHECK(rad2deg(s.bfov.phi) == doctest::Approx(30).epsilon(0.01));
  }
  fs::remove_all(dir);
}

TEST_CASE("runs are deterministic and failures carry the estimate") {
  const ErpDims d(512, 256);
  HarnessConfig cfg;
  FixedAdapter a, b;
  const FrameAnnotation init = init_at(fov_deg(40, -10, 30, 20));
  const auto r1 = run_ope(blank_frames(d, 8), init, cfg, a);
  const auto r2 = run_ope(blank_frames(d, 8), init, cfg, b);
  for (std::size_t i = 0; i < r1.size(); ++i) {
    CHECK(r1[i].bfov.clon == r2[i].bfov.clon);
    CHECK(r1[i].bbox.cx == r2[i].bbox.cx);
    CHECK(r1[i].rbfov.theta == r2[i].rbfov.theta);
  }
  FixedAdapter c;
  c.fail_on = 3;
  const auto r3 = run_ope(blank_frames(d, 8), init, cfg, c);
  CHECK(r3[3].failed);
  CHECK_FALSE(r3[3].error.empty());
  CHECK(r3[3].bfov.clon == r3[2].bfov.clon);
  CHECK(r3[3].bbox.cx == r3[2].bbox.cx);
  CHECK_FALSE(r3[4].failed);
}

TEST_CASE("forcing tangent regions changes nothing for small targets") {
  const fs::path dir = scratch("force");
  const ErpDims d(1024, 512);
  HarnessConfig ext, tan;
  ext.sidecar = dir / "a.json";
  tan.sidecar = dir / "b.json";
  tan.mode = ModeOverride::kForceTangent;
  SidecarOracle oa(ext.sidecar), ob(tan.sidecar);
  const TruthDisk t1 = disk_at(1);
  const FrameAnnotation init = init_at({t1.lon, t1.lat, 2 * t1.radius, 2 * t1.radius, 0});
  const auto a = run_ope(blank_frames(d, 10), init, ext, oa);
  const auto b = run_ope(blank_frames(d, 10), init, tan, ob);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].mode == RegionMode::kTangent);
    CHECK(a[i].bfov.clon == b[i].bfov.clon);
    CHECK(a[i].bfov.theta == b[i].bfov.theta);
    CHECK(a[i].bbox.w == b[i].bbox.w);
  }
  fs::remove_all(dir);
}

TEST_CASE("sidecar round trip") {
  const fs::path dir = scratch("sidecar");
  const SearchSidecar s{4, fov_deg(10, 20, 80, 60), RegionMode::kTangent, 225, 167, 1024, 512};
  write_sidecar(dir / "s.json", s);
  const SearchSidecar r = read_sidecar(dir / "s.json");
  CHECK(r.frame == 4);
  CHECK(r.search.theta == doctest::Approx(s.search.theta).epsilon(1e-12));
  CHECK(r.region().width() == 225);
  CHECK_THROWS_AS(read_sidecar(dir / "none.json"), IoError);
  fs::remove_all(dir);
}

TEST_CASE("wire helpers") {
  std::stringstream io;
  write_message(io, {{"type", "track"}, {"image_bytes", 3}});
  io << "abc";
  write_message(io, {{"type", "bye"}});
  const auto m = read_message(io);
  REQUIRE(m);
  CHECK(m->at("type") == "track");
  CHECK(read_payload(io, 3) == std::vector<std::uint8_t>{'a', 'b', 'c'});
  CHECK(read_message(io)->at("type") == "bye");
  CHECK_FALSE(read_message(io));
  std::stringstream junk("{oops\n");
  CHECK_THROWS_AS(read_message(junk), AdapterError);
  const Bbox b{1, 2, 3, 4, deg2rad(30)};
  const Bbox c = bbox_from_json(bbox_to_json(b));
  CHECK(c.gamma == doctest::Approx(b.gamma));
  CHECK(bbox_to_json(b)[4].get<double>() == doctest::Approx(30));
}

TEST_CASE("process adapter failure modes") {
  const std::string exe = OMNITRACK_TEST_ADAPTER;
  const ErpDims d(256, 128);
  const FrameAnnotation init = init_at(fov_deg(0, 0, 30, 30));
  HarnessConfig cfg;
  using namespace std::chrono_literals;

  SUBCASE("fixed") {
    ProcessAdapter a(exe + " fixed", 5s);
    CHECK(a.hello() == "test-fixed");
    const auto steps = run_ope(blank_frames(d, 4), init, cfg, a);
    for (const auto& s : steps) CHECK_FALSE(s.failed);
    a.close();
  }
  SUBCASE("crash") {
    ProcessAdapter a(exe + " crash 2", 5s);
    a.hello();
    const auto steps = run_ope(blank_frames(d, 5), init, cfg, a);
    CHECK_FALSE(steps[1].failed);
    CHECK(steps[2].failed);
    CHECK(steps[4].failed);
    CHECK(steps[4].bfov.clon == steps[1].bfov.clon);
    CHECK_FALSE(a.alive());
  }
  SUBCASE("hang") {
    ProcessAdapter a(exe + " hang 1", 300ms);
    a.hello();
    const auto t0 = std::chrono::steady_clock::now();
    const auto steps = run_ope(blank_frames(d, 3), init, cfg, a);
    CHECK(steps[1].failed);
    CHECK(steps[1].error.find("timed out") != std::string::npos);
    CHECK(std::chrono::steady_clock::now() - t0 < 5s);
  }
  SUBCASE("garbage") {
    ProcessAdapter a(exe + " garbage 1", 5s);
    a.hello();
    const auto steps = run_ope(blank_frames(d, 3), init, cfg, a);
    CHECK(steps[1].failed);
  }
  SUBCASE("silent") {
    ProcessAdapter a(exe + " silent", 300ms);
    CHECK_THROWS_AS(a.hello(), AdapterError);
  }
  SUBCASE("missing program") {
    ProcessAdapter a("/nonexistent/tracker", 2s);
    CHECK_THROWS_AS(a.hello(), AdapterError);
  }
}
