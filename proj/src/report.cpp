#include "omnitrack/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "omnitrack/dataset_io.hpp"
#include "omnitrack/errors.hpp"
#include "omnitrack/geometry2d.hpp"
#include "omnitrack/region.hpp"

namespace omni {

using nlohmann::ordered_json;

namespace {

// Rounded so reports do not depend on the last bits of summation order.
double r9(double v) {
  if (!std::isfinite(v)) return v;
  return std::round(v * 1e9) / 1e9;
}

ordered_json opt_value(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return r9(*v);
}

ordered_json curve_json(const std::optional<Curve>& c) {
  if (!c) return nullptr;
  ordered_json j;
  std::vector<double> t, r;
  for (double x : c->thresholds) t.push_back(r9(x));
  for (double x : c->rates) r.push_back(r9(x));
  j["thresholds"] = t;
  j["rates"] = r;
  j["auc"] = r9(c->auc);
  return j;
}

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

ordered_json bfov_json(const Bfov& f) {
  return {rad2deg(f.clon), rad2deg(f.clat), rad2deg(f.theta), rad2deg(f.phi), rad2deg(f.gamma)};
}

void plot(Image& img, double u, double v, Rgb color, int thickness) {
  const int W = img.width(), H = img.height();
  const int cu = static_cast<int>(std::floor(u)), cv = static_cast<int>(std::floor(v));
  const int lo = -(thickness - 1) / 2, hi = thickness / 2;
  for (int dv = lo; dv <= hi; ++dv) {
    const int row = cv + dv;
    if (row < 0 || row >= H) continue;
    for (int du = lo; du <= hi; ++du) {
      const int col = static_cast<int>(wrap_mod(cu + du, W));
      for (int ch = 0; ch < img.channels(); ++ch) {
        img.at(row, col, ch) = img.channels() == 3 ? color[ch] : color[0];
      }
    }
  }
}

}  // namespace

ordered_json report_to_json(const MetricReport& r) {
  ordered_json j;
  j["repr"] = std::string(repr_name(r.repr));
  j["frames_scored"] = r.frames_scored;
  ordered_json s;
  s["S_dual_auc"] = opt_value(r.s_dual_auc);
  s["P_dual_20px"] = opt_value(r.p_dual_20);
  s["P_dual_norm_auc"] = opt_value(r.np_dual_auc);
  s["P_angle_3deg"] = opt_value(r.p_angle_3);
  s["S_sphere_auc"] = opt_value(r.s_sphere_auc);
  j["scalars"] = s;
  ordered_json c;
  c["success"] = curve_json(r.success);
  c["precision"] = curve_json(r.precision);
  c["norm_precision"] = curve_json(r.norm_precision);
  c["angle"] = curve_json(r.angle);
  c["sphere_success"] = curve_json(r.sphere_success);
  j["curves"] = c;
  ordered_json frames = ordered_json::array();
  for (const FrameScores& f : r.frames) {
    ordered_json fj;
    fj["frame"] = f.frame;
    fj["scored"] = f.scored;
    fj["S_dual"] = opt_value(f.s_dual);
    fj["P_dual"] = opt_value(f.p_dual);
    fj["P_dual_norm"] = opt_value(f.np_dual);
    fj["P_angle"] = opt_value(f.p_angle);
    fj["S_sphere"] = opt_value(f.s_sphere);
    frames.push_back(std::move(fj));
  }
  j["frames"] = std::move(frames);
  return j;
}

std::string headline(const MetricReport& r) {
  std::string out;
  auto add = [&](const char* name, const std::optional<double>& v) {
    if (!v) return;
    if (!out.empty()) out += ' ';
    out += std::string(name) + "=" + fmt3(*v);
  };
  add("S_dual(AUC)", r.s_dual_auc);
  add("P_dual", r.p_dual_20);
  add("P_dual_norm(AUC)", r.np_dual_auc);
  add("P_angle", r.p_angle_3);
  add("S_sphere(AUC)", r.s_sphere_auc);
  return out;
}

void write_run(const std::filesystem::path& dir, std::span<const TrackStep> steps) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::optional<Bbox>> bbox, rbbox;
  std::vector<std::optional<Bfov>> bfov, rbfov;
  ordered_json js = ordered_json::array();
  for (const TrackStep& s : steps) {
    bbox.emplace_back(s.bbox);
    rbbox.emplace_back(s.rbbox);
    bfov.emplace_back(s.bfov);
    rbfov.emplace_back(s.rbfov);
    ordered_json j;
    j["frame"] = s.frame;
    j["failed"] = s.failed;
    if (s.failed) j["error"] = s.error;
    j["search"] = bfov_json(s.search);
    j["mode"] = s.mode == RegionMode::kTangent ? "tangent" : "sphere";
    j["local_size"] = {s.local_width, s.local_height};
    if (s.local_box) {
      j["local_box"] = {s.local_box->cx, s.local_box->cy, s.local_box->w, s.local_box->h,
                        rad2deg(s.local_box->gamma)};
    } else {
      j["local_box"] = nullptr;
    }
    j["score"] = s.score;
    j["wall_ms"] = s.wall_ms;
    js.push_back(std::move(j));
  }
  write_bbox_file(dir / "bbox.txt", bbox);
  write_bbox_file(dir / "rbbox.txt", rbbox);
  write_bfov_file(dir / "bfov.txt", bfov);
  write_bfov_file(dir / "rbfov.txt", rbfov);
  std::ofstream out(dir / "steps.json");
  if (!out) throw IoError("cannot write " + (dir / "steps.json").string());
  out << js.dump(1) << '\n';
}

void draw_bbox(Image& img, const Bbox& b, Rgb color, int thickness) {
  const auto corners = geom::rect_corners({b.cx, b.cy, b.w, b.h, b.gamma});
  for (int e = 0; e < 4; ++e) {
    const auto& p = corners[e];
    const auto& q = corners[(e + 1) % 4];
    const int n = std::max(2, static_cast<int>(std::ceil(std::hypot(q.x - p.x, q.y - p.y) * 2)));
    for (int k = 0; k <= n; ++k) {
      const double t = static_cast<double>(k) / n;
      plot(img, p.x + (q.x - p.x) * t, p.y + (q.y - p.y) * t, color, thickness);
    }
  }
}

void draw_bfov(Image& img, const Bfov& f, Rgb color, int thickness) {
  const ErpDims d(img.width(), img.height());
  constexpr int kNodes = 129;
  const RegionMap rm(f, d, select_region_mode(f.theta, f.phi), kNodes, kNodes);
  const int per_edge = std::max(64, d.width());
  const auto outline = box_outline({kNodes / 2.0, kNodes / 2.0, double(kNodes), double(kNodes), 0.0},
                                   kNodes, kNodes, per_edge);
  for (const PixCoord& q : outline) {
    const PixCoord p = sph_to_pix(vec_to_sph(rm.local_to_global(q)), d);
    plot(img, p.u, std::min(p.v, d.height() - 0.5), color, thickness);
  }
}

}  // namespace omni
