#include <doctest.h>

#include <fstream>
#include <random>
#include <unistd.h>

#include "omnitrack/dataset_io.hpp"
#include "omnitrack/errors.hpp"
#include "omnitrack/image.hpp"

using namespace omni;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("omnitrack_io_" + std::to_string(getpid()) + "_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream(p) << s;
}

}  // namespace

TEST_CASE("annotation lines round-trip at six decimals") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 3840), s(0.5, 900), g(-89, 90), lon(-180, 180), lat(-90, 90);
  for (int i = 0; i < 2000; ++i) {
    const Bbox b{u(rng), u(rng) / 2, s(rng), s(rng), deg2rad(g(rng))};
    const std::string line = format_bbox(b);
    const auto p = parse_bbox(line);
    REQUIRE(p);
    CHECK(format_bbox(*p) == line);
    CHECK(std::abs(p->cx - b.cx) <= 5e-7);
    const Bfov f{deg2rad(lon(rng)), deg2rad(lat(rng)), deg2rad(s(rng) / 3), deg2rad(s(rng) / 6), deg2rad(g(rng))};
    const std::string fl = format_bfov(f);
    const auto q = parse_bfov(fl);
    REQUIRE(q);
    CHECK(format_bfov(*q) == fl);
  }
  CHECK(format_bbox({1, 2, 3, 4, -0.0}) == "1.000000,2.000000,3.000000,4.000000,0.000000");
}

TEST_CASE("annotation line parsing") {
  CHECK_FALSE(parse_bbox("none"));
  CHECK_FALSE(parse_bfov("  none "));
  const auto b = parse_bbox("10,20,30,40");
  REQUIRE(b);
  CHECK(b->gamma == 0.0);
  const auto f = parse_bfov("90,-45,30,20,10");
  REQUIRE(f);
  CHECK(f->clon == doctest::Approx(kHalfPi));
  CHECK(f->gamma == doctest::Approx(deg2rad(10)));
  CHECK_THROWS_AS(parse_bbox("1,2,3"), ValidationError);
  CHECK_THROWS_AS(parse_bbox("1,2,3,4,5,6"), ValidationError);
  CHECK_THROWS_AS(parse_bbox("1,2,x,4"), ValidationError);
  CHECK_THROWS_AS(parse_bbox("1,2,0,4"), ValidationError);
  CHECK_THROWS_AS(parse_bfov("0,0,400,20"), ValidationError);
}

TEST_CASE("annotation files") {
  const fs::path dir = scratch("files");
  std::vector<std::optional<Bbox>> rows{Bbox{1, 2, 3, 4, 0}, std::nullopt, Bbox{5, 6, 7, 8, 0.5}};
  write_bbox_file(dir / "bbox.txt", rows, "cx,cy,w,h,gamma_deg");
  const auto back = read_bbox_file(dir / "bbox.txt");
  REQUIRE(back.size() == 3);
  CHECK_FALSE(back[1]);
  CHECK(back[2]->gamma == doctest::Approx(0.5).epsilon(1e-6));
  write_text(dir / "bad.txt", "# header\n1,2,3,4\n1,2\n");
  CHECK_THROWS_WITH_AS(read_bbox_file(dir / "bad.txt"), doctest::Contains("bad.txt:3"), ValidationError);
  CHECK_THROWS_AS(read_bbox_file(dir / "missing.txt"), IoError);
  fs::remove_all(dir);
}

TEST_CASE("sequence layout") {
  const fs::path dir = scratch("seq");
  SequenceMeta m;
  m.name = "demo";
  m.width = 64;
  m.height = 32;
  m.frames = 3;
  write_meta(dir / "meta.txt", m);
  const SequenceLayout seq(dir);
  CHECK(seq.meta().name == "demo");
  CHECK(seq.meta().dims() == ErpDims(64, 32));
  CHECK(seq.frame_path(7).filename() == "000007.png");
  write_text(dir / "bbox.txt", "1,1,2,2,0\nnone\n3,3,2,2,0\n");
  write_text(dir / "bfov.txt", "0,0,10,10,0\n1,0,10,10,0\n2,0,10,10,0\n");
  const auto anns = seq.load_annotations();
  REQUIRE(anns.size() == 3);
  CHECK(anns[0].frame == 1);
  CHECK_FALSE(anns[1].bbox);
  CHECK(anns[2].bfov);
  CHECK_FALSE(anns[0].rbbox);
  write_text(dir / "rbfov.txt", "0,0,10,10,0\n");
  CHECK_THROWS_AS(seq.load_annotations(), ValidationError);
  fs::remove(dir / "rbfov.txt");

  AttributeSet a;
  a.set("HL", true);
  write_attributes(dir / "attributes.txt", a);
  CHECK(read_attributes(dir / "attributes.txt").get("HL"));
  CHECK_FALSE(read_attributes(dir / "attributes.txt").get("LV"));
  write_text(dir / "attributes.txt", "HL=2\n");
  CHECK_THROWS_AS(read_attributes(dir / "attributes.txt"), ValidationError);

  Mask mk(ErpDims(8, 4));
  mk.set(1, 7, true);
  write_mask(dir / "m.png", mk);
  CHECK(read_mask(dir / "m.png").bits() == mk.bits());
  write_png(dir / "odd.png", Image(7, 3, 1));
  CHECK_THROWS_AS(read_mask(dir / "odd.png"), ValidationError);
  fs::remove_all(dir);
}
