#include "omnitrack/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include "omnitrack/errors.hpp"
#include "omnitrack/geometry2d.hpp"

namespace omni {

using nlohmann::json;

void HarnessConfig::validate() const {
  if (!(context_scale >= 1.0)) throw ValidationError("context scale must be >= 1");
  if (!(min_fov > 0.0) || min_fov > max_theta || min_fov > max_phi) {
    throw ValidationError("minimum search FoV must be positive and not exceed the maximum");
  }
  if (max_theta > kTwoPi || max_phi > kPi) {
    throw ValidationError("maximum search FoV cannot exceed 360x180 deg");
  }
  if (!(max_tangent_fov > 0.0 && max_tangent_fov < kPi)) {
    throw ValidationError("tangent search FoV cap must lie in (0, 180) deg");
  }
  if (outline_samples < 1) throw ValidationError("outline needs at least one sample per edge");
}

Bfov search_region(const Bfov& estimate, const HarnessConfig& cfg) {
  double max_t = cfg.max_theta, max_p = cfg.max_phi;
  if (cfg.mode == ModeOverride::kForceTangent) {
    max_t = std::min(max_t, cfg.max_tangent_fov);
    max_p = std::min(max_p, cfg.max_tangent_fov);
  }
  const double lo_t = std::min(cfg.min_fov, max_t), lo_p = std::min(cfg.min_fov, max_p);
  return {estimate.clon, estimate.clat,
          std::clamp(estimate.theta * cfg.context_scale, lo_t, max_t),
          std::clamp(estimate.phi * cfg.context_scale, lo_p, max_p), 0.0};
}

Bfov bbox_to_init_bfov(const Bbox& b, const ErpDims& d) {
  const Bbox c = canonicalize_bbox(b, d);
  const int per_edge = std::max(64, static_cast<int>(std::ceil(std::max(c.w, c.h))));
  const auto corners = geom::rect_corners({c.cx, c.cy, c.w, c.h, c.gamma});
  std::vector<LonLat> pts;
  pts.reserve(static_cast<std::size_t>(4 * per_edge));
  for (int e = 0; e < 4; ++e) {
    const auto& p = corners[e];
    const auto& q = corners[(e + 1) % 4];
    for (int s = 0; s < per_edge; ++s) {
      const double t = static_cast<double>(s) / per_edge;
      const double u = p.x + (q.x - p.x) * t;
      const double v = std::clamp(p.y + (q.y - p.y) * t, 0.0, double(d.height()));
      pts.push_back(pix_to_sph({wrap_mod(u, d.width()), v}, d));
    }
  }
  return points_to_bfov(pts, false);
}

Bfov init_bfov(const FrameAnnotation& init, const ErpDims& d) {
  if (init.bfov) return validate_bfov(*init.bfov);
  if (init.rbfov) return validate_bfov(*init.rbfov);
  if (init.bbox) return bbox_to_init_bfov(*init.bbox, d);
  if (init.rbbox) return bbox_to_init_bfov(*init.rbbox, d);
  throw ValidationError("the initial frame carries no BFoV or BBox");
}

Bbox project_region_box(const Bfov& target, const RegionMap& rm) {
  constexpr int kNodes = 65;
  const RegionMode mode = select_region_mode(target.theta, target.phi);
  const RegionMap outline(target, rm.dims(), mode, kNodes, kNodes);
  std::vector<geom::Point2> pts;
  auto add = [&](int i, int j) {
    const auto p = rm.to_local(outline.dir(i, j));
    if (!p) return;
    pts.push_back({std::clamp(p->u, 0.0, double(rm.width())),
                   std::clamp(p->v, 0.0, double(rm.height()))});
  };
  for (int k = 0; k < kNodes; ++k) {
    add(0, k);
    add(kNodes - 1, k);
    add(k, 0);
    add(k, kNodes - 1);
  }
  if (pts.empty()) throw DomainError("target region is not visible in the search region");
  const geom::RotatedRect r = geom::bounding_rect(pts);
  return {r.cx, r.cy, std::max(r.w, 1e-6), std::max(r.h, 1e-6), 0.0};
}

void back_project(const Bbox& local_box, const RegionMap& rm, int outline_samples, TrackStep& step) {
  const auto outline = box_outline(local_box, rm.width(), rm.height(), outline_samples);
  const auto pts = local_points_to_global(outline, rm);
  step.bbox = points_to_min_bbox(pts, rm.dims(), false);
  step.rbbox = points_to_min_bbox(pts, rm.dims(), true);
  step.bfov = points_to_bfov(pts, false, std::nullopt, false);
  step.rbfov = points_to_bfov(pts, true, local_box.gamma, false);
}

namespace {

void check_local_box(const Bbox& b) {
  for (double v : {b.cx, b.cy, b.w, b.h, b.gamma}) {
    if (!std::isfinite(v)) throw AdapterError("adapter returned a non-finite box");
  }
  if (!(b.w > 0) || !(b.h > 0)) throw AdapterError("adapter returned an empty box");
}

std::string_view mode_name(RegionMode m) { return m == RegionMode::kTangent ? "tangent" : "sphere"; }

}  // namespace

std::vector<TrackStep> run_ope(const FrameSource& frames, const FrameAnnotation& init,
                               const HarnessConfig& cfg, TrackerAdapter& adapter) {
  cfg.validate();
  if (frames.count < 1) throw ValidationError("sequence has no frames");
  using Clock = std::chrono::steady_clock;
  const ErpDims& dims = frames.dims;
  std::vector<TrackStep> steps;
  steps.reserve(static_cast<std::size_t>(frames.count));

  auto prepare = [&](int frame, const Bfov& estimate, TrackStep& step) {
    step.frame = frame;
    step.search = search_region(estimate, cfg);
    RegionMap rm = build_region(step.search, dims, cfg.resolution, cfg.mode);
    step.mode = rm.mode();
    step.local_width = rm.width();
    step.local_height = rm.height();
    if (!cfg.sidecar.empty()) {
      write_sidecar(cfg.sidecar, {frame, step.search, rm.mode(), rm.width(), rm.height(),
                                  dims.width(), dims.height()});
    }
    return rm;
  };

  // Initialization frame.
  {
    const auto t0 = Clock::now();
    const Bfov start = init_bfov(init, dims);
    TrackStep step;
    const RegionMap rm = prepare(1, start, step);
    const Image local = unwarp(frames.load(1), rm, cfg.jobs);
    const Bbox box = project_region_box(start, rm);
    step.local_box = box;
    step.score = 1.0;
    back_project(box, rm, cfg.outline_samples, step);
    step.bfov = start;
    if (init.bbox) step.bbox = canonicalize_bbox(*init.bbox, dims);
    if (init.rbbox) step.rbbox = canonicalize_bbox(*init.rbbox, dims);
    if (init.rbfov) step.rbfov = *init.rbfov;
    adapter.init(local, box);
    step.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    steps.push_back(std::move(step));
  }

  for (int t = 2; t <= frames.count; ++t) {
    const auto t0 = Clock::now();
    const TrackStep& prev = steps.back();
    TrackStep step;
    try {
      const RegionMap rm = prepare(t, prev.bfov, step);
      const Image local = unwarp(frames.load(t), rm, cfg.jobs);
      const TrackResult r = adapter.track(local);
      check_local_box(r.box);
      step.local_box = r.box;
      step.score = r.score;
      back_project(r.box, rm, cfg.outline_samples, step);
    } catch (const Error& e) {
      step.failed = true;
      step.error = e.what();
      step.local_box.reset();
      step.bbox = prev.bbox;
      step.rbbox = prev.rbbox;
      step.bfov = prev.bfov;
      step.rbfov = prev.rbfov;
    }
    step.frame = t;
    step.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    steps.push_back(std::move(step));
  }
  return steps;
}

RegionMap SearchSidecar::region() const {
  return RegionMap(search, ErpDims(erp_width, erp_height), mode, width, height);
}

void write_sidecar(const std::filesystem::path& path, const SearchSidecar& s) {
  const json j = {{"frame", s.frame},
                  {"search", {s.search.clon, s.search.clat, s.search.theta, s.search.phi, s.search.gamma}},
                  {"mode", mode_name(s.mode)},
                  {"width", s.width},
                  {"height", s.height},
                  {"erp_width", s.erp_width},
                  {"erp_height", s.erp_height}};
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << j.dump() << '\n';
  }
  std::filesystem::rename(tmp, path);
}

SearchSidecar read_sidecar(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open sidecar " + path.string());
  try {
    const json j = json::parse(in);
    SearchSidecar s;
    s.frame = j.at("frame").get<int>();
    const auto& f = j.at("search");
    s.search = {f.at(0).get<double>(), f.at(1).get<double>(), f.at(2).get<double>(),
                f.at(3).get<double>(), f.at(4).get<double>()};
    const std::string mode = j.at("mode").get<std::string>();
    if (mode != "tangent" && mode != "sphere") throw ValidationError("unknown mode " + mode);
    s.mode = mode == "tangent" ? RegionMode::kTangent : RegionMode::kSphere;
    s.width = j.at("width").get<int>();
    s.height = j.at("height").get<int>();
    s.erp_width = j.at("erp_width").get<int>();
    s.erp_height = j.at("erp_height").get<int>();
    return s;
  } catch (const json::exception& e) {
    throw ValidationError("bad sidecar " + path.string() + ": " + e.what());
  }
}

}  // namespace omni
