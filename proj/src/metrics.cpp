#include "omnitrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "omnitrack/errors.hpp"
#include "omnitrack/geometry2d.hpp"
#include "omnitrack/parallel.hpp"
#include "omnitrack/region.hpp"

namespace omni {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

geom::RotatedRect as_rect(const Bbox& b) { return {b.cx, b.cy, b.w, b.h, b.gamma}; }

Bbox shifted(const Bbox& b, double dx) {
  Bbox s = b;
  s.cx += dx;
  return s;
}

LonLat box_center(const Bbox& b, const ErpDims& d) {
  return pix_to_sph({wrap_mod(b.cx, d.width()), std::clamp(b.cy, 0.0, double(d.height()))}, d);
}

struct Areas {
  double a = 0, b = 0, inter = 0;
};

double cell_area(int row, int W, int H) {
  const double top = (0.5 - double(row) / H) * kPi;
  const double bot = (0.5 - double(row + 1) / H) * kPi;
  return kTwoPi / W * (std::sin(top) - std::sin(bot));
}

Vec3 grid_dir(double lon, double lat) {
  const double cl = std::cos(lat);
  return {cl * std::sin(lon), -std::sin(lat), cl * std::cos(lon)};
}

// Coverage of the cell [lon0, lon1] x [bot, top] by `own` and by both regions.
// Cells whose corners and center disagree are split until `depth` runs out;
// leaves use the center test.
void cover(const RegionTest& own, const RegionTest* other, double lon0, double lon1, double top,
           double bot, int depth, double* area, double* inter) {
  const double cell = (lon1 - lon0) * (std::sin(top) - std::sin(bot));
  const double mlon = (lon0 + lon1) / 2, mlat = (top + bot) / 2;
  const Vec3 mid = grid_dir(mlon, mlat);
  if (depth == 0) {
    if (!own.contains(mid)) return;
    *area += cell;
    if (other && other->contains(mid)) *inter += cell;
    return;
  }
  const Vec3 pts[5] = {mid, grid_dir(lon0, top), grid_dir(lon1, top), grid_dir(lon0, bot),
                       grid_dir(lon1, bot)};
  int in_own = 0, in_other = 0;
  for (const Vec3& p : pts) {
    in_own += own.contains(p) ? 1 : 0;
    in_other += other && other->contains(p) ? 1 : 0;
  }
  if (in_own == 0) return;
  if (in_own == 5 && (in_other == 0 || in_other == 5)) {
    *area += cell;
    if (in_other == 5) *inter += cell;
    return;
  }
  for (int q = 0; q < 4; ++q) {
    const double a0 = q % 2 ? mlon : lon0, a1 = q % 2 ? lon1 : mlon;
    const double t = q < 2 ? top : mlat, b = q < 2 ? mlat : bot;
    cover(own, other, a0, a1, t, b, depth - 1, area, inter);
  }
}

Areas raster_areas(const RegionTest& ta, const RegionTest& tb, const ErpDims& grid, int depth) {
  const int W = grid.width(), H = grid.height();
  const double dlon = kTwoPi / W, dlat = kPi / H;
  Areas out;
  auto walk = [&](const RegionTest& own, const RegionTest* other, double* area, double* inter) {
    for (const RowSpan& s : cap_spans(grid, own.center(), own.cap_radius())) {
      const double top = kPi / 2 - s.row * dlat;
      for (int k = 0; k < s.count; ++k) {
        const int j = static_cast<int>(wrap_mod(s.begin + k, W));
        const double lon0 = j * dlon - kPi;
        cover(own, other, lon0, lon0 + dlon, top, top - dlat, depth, area, inter);
      }
    }
  };
  walk(ta, &tb, &out.a, &out.inter);
  walk(tb, nullptr, &out.b, nullptr);
  return out;
}

double iou_from(const Areas& ar) {
  const double uni = ar.a + ar.b - ar.inter;
  return uni > 0 ? std::clamp(ar.inter / uni, 0.0, 1.0) : 0.0;
}

Curve make_curve(int n, double step, const std::vector<double>& values,
                 bool success_type) {
  Curve c;
  c.thresholds.resize(static_cast<std::size_t>(n));
  c.rates.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    // i / (1/step) keeps thresholds like 3.0 exact.
    const double t = i / std::round(1.0 / step);
    c.thresholds[i] = t;
    if (values.empty()) continue;
    std::size_t hits = 0;
    for (double v : values) {
      const bool ok = success_type ? (i == 0 ? v > 0.0 : v >= t - 1e-9) : v <= t;
      hits += ok ? 1 : 0;
    }
    c.rates[i] = static_cast<double>(hits) / static_cast<double>(values.size());
  }
  double sum = 0;
  for (double r : c.rates) sum += r;
  c.auc = sum / n;
  return c;
}

Curve make_pixel_curve(const std::vector<double>& values) {
  Curve c;
  for (int t = 0; t <= 50; ++t) {
    c.thresholds.push_back(t);
    std::size_t hits = 0;
    for (double v : values) hits += v <= t ? 1 : 0;
    c.rates.push_back(values.empty() ? 0.0 : double(hits) / double(values.size()));
  }
  double sum = 0;
  for (double r : c.rates) sum += r;
  c.auc = sum / static_cast<double>(c.rates.size());
  return c;
}

}  // namespace

double iou_bbox(const Bbox& a, const Bbox& b) {
  const double area_a = a.w * a.h, area_b = b.w * b.h;
  if (area_a <= 0 || area_b <= 0) return 0.0;
  double inter = 0.0;
  if (a.gamma == 0.0 && b.gamma == 0.0) {
    const double ix = std::min(a.cx + a.w / 2, b.cx + b.w / 2) - std::max(a.cx - a.w / 2, b.cx - b.w / 2);
    const double iy = std::min(a.cy + a.h / 2, b.cy + b.h / 2) - std::max(a.cy - a.h / 2, b.cy - b.h / 2);
    inter = std::max(0.0, ix) * std::max(0.0, iy);
  } else {
    const auto pa = geom::rect_corners(as_rect(a));
    const auto pb = geom::rect_corners(as_rect(b));
    inter = std::abs(geom::polygon_area(geom::clip_convex(pa, pb)));
  }
  const double uni = area_a + area_b - inter;
  return uni > 0 ? std::clamp(inter / uni, 0.0, 1.0) : 0.0;
}

double success_dual(const Bbox& gt, const Bbox& tr, const ErpDims& d) {
  const double W = d.width();
  double best = iou_bbox(gt, tr);
  for (double dx : {-W, W}) best = std::max(best, iou_bbox(shifted(gt, dx), tr));
  return best;
}

double precision_dual(const Bbox& gt, const Bbox& tr, const ErpDims& d) {
  const double W = d.width();
  double best = kInf;
  for (double dx : {0.0, -W, W}) {
    best = std::min(best, std::hypot(gt.cx + dx - tr.cx, gt.cy - tr.cy));
  }
  return best;
}

double normalized_precision_dual(const Bbox& gt, const Bbox& tr, const ErpDims& d) {
  if (!(gt.w > 0) || !(gt.h > 0)) {
    throw DomainError("normalized precision needs a gt box with positive width and height");
  }
  const double W = d.width();
  double best = kInf;
  for (double dx : {0.0, -W, W}) {
    best = std::min(best, std::hypot((gt.cx + dx - tr.cx) / gt.w, (gt.cy - tr.cy) / gt.h));
  }
  return best;
}

double angle_precision(const LonLat& gt_center, const LonLat& tr_center) {
  return rad2deg(angular_distance(gt_center, tr_center));
}

double sphere_iou(const Bfov& a, const Bfov& b, const ErpDims& grid) {
  const RegionTest ta(validate_bfov(a), select_region_mode(a.theta, a.phi));
  const RegionTest tb(validate_bfov(b), select_region_mode(b.theta, b.phi));
  return iou_from(raster_areas(ta, tb, grid, 0));
}

double sphere_iou(const Bfov& a, const Bfov& b, const SphereIouOptions& opt) {
  const RegionTest ta(validate_bfov(a), select_region_mode(a.theta, a.phi));
  const RegionTest tb(validate_bfov(b), select_region_mode(b.theta, b.phi));
  int W = opt.grid_width;
  for (;;) {
    const ErpDims grid(W, W / 2);
    const Areas ar = raster_areas(ta, tb, grid, opt.subdivisions);
    const double cell = cell_area(W / 4, W, W / 2);  // near-equator cell
    const bool coarse = std::min(ar.a, ar.b) < opt.min_cells * cell;
    if (!coarse || W * 2 > opt.max_width) return iou_from(ar);
    W *= 2;
  }
}

std::string_view repr_name(Repr r) {
  switch (r) {
    case Repr::kBbox: return "bbox";
    case Repr::kRbbox: return "rbbox";
    case Repr::kBfov: return "bfov";
    case Repr::kRbfov: return "rbfov";
  }
  return "bbox";
}

std::optional<Repr> parse_repr(std::string_view s) {
  for (Repr r : {Repr::kBbox, Repr::kRbbox, Repr::kBfov, Repr::kRbfov}) {
    if (repr_name(r) == s) return r;
  }
  return std::nullopt;
}

double Curve::rate_at(double t) const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < thresholds.size(); ++i) {
    if (std::abs(thresholds[i] - t) < std::abs(thresholds[best] - t)) best = i;
  }
  return rates.empty() ? 0.0 : rates[best];
}

MetricReport ope_evaluate(std::span<const FramePair> pairs, const ErpDims& d, Repr repr,
                          const EvalOptions& opt) {
  if (pairs.size() < 2) {
    throw ValidationError("one-pass evaluation needs at least 2 frames (the first initializes)");
  }
  MetricReport rep;
  rep.repr = repr;
  rep.frames.resize(pairs.size());

  auto box_of = [repr](const FrameAnnotation& a) -> const std::optional<Bbox>& {
    return repr == Repr::kBbox ? a.bbox : a.rbbox;
  };
  auto fov_of = [repr](const FrameAnnotation& a) -> const std::optional<Bfov>& {
    return repr == Repr::kBfov ? a.bfov : a.rbfov;
  };

  parallel_for(pairs.size(), opt.jobs, [&](std::size_t i) {
    const FramePair& p = pairs[i];
    FrameScores& fs = rep.frames[i];
    fs.frame = p.gt.frame;
    if (i == 0) return;
    if (is_box_repr(repr)) {
      const auto& gt = box_of(p.gt);
      if (!gt) return;
      fs.scored = true;
      const auto& tr = box_of(p.tr);
      if (!tr) {
        fs.s_dual = 0.0;
        fs.p_dual = fs.np_dual = fs.p_angle = kInf;
        return;
      }
      fs.s_dual = success_dual(*gt, *tr, d);
      fs.p_dual = precision_dual(*gt, *tr, d);
      fs.np_dual = normalized_precision_dual(*gt, *tr, d);
      fs.p_angle = angle_precision(box_center(*gt, d), box_center(*tr, d));
    } else {
      const auto& gt = fov_of(p.gt);
      if (!gt) return;
      fs.scored = true;
      const auto& tr = fov_of(p.tr);
      if (!tr) {
        fs.s_sphere = 0.0;
        fs.p_angle = kInf;
        return;
      }
      fs.s_sphere = sphere_iou(*gt, *tr, opt.sphere);
      fs.p_angle = angle_precision(gt->center(), tr->center());
    }
  });

  std::vector<double> s, p, np, ang, sph;
  for (const FrameScores& fs : rep.frames) {
    if (!fs.scored) continue;
    ++rep.frames_scored;
    if (fs.s_dual) s.push_back(*fs.s_dual);
    if (fs.p_dual) p.push_back(*fs.p_dual);
    if (fs.np_dual) np.push_back(*fs.np_dual);
    if (fs.p_angle) ang.push_back(*fs.p_angle);
    if (fs.s_sphere) sph.push_back(*fs.s_sphere);
  }
  if (rep.frames_scored == 0) {
    throw ValidationError("no frame after the first carries a ground-truth " +
                          std::string(repr_name(repr)));
  }
  rep.angle = make_curve(101, 0.1, ang, false);
  rep.p_angle_3 = rep.angle->rate_at(3.0);
  if (is_box_repr(repr)) {
    rep.success = make_curve(101, 0.01, s, true);
    rep.precision = make_pixel_curve(p);
    rep.norm_precision = make_curve(51, 0.01, np, false);
    rep.s_dual_auc = rep.success->auc;
    rep.p_dual_20 = rep.precision->rate_at(20.0);
    rep.np_dual_auc = rep.norm_precision->auc;
  } else {
    rep.sphere_success = make_curve(101, 0.01, sph, true);
    rep.s_sphere_auc = rep.sphere_success->auc;
  }
  return rep;
}

// Attributes ---------------------------------------------------------------

std::optional<std::size_t> attribute_index(std::string_view name) {
  for (std::size_t i = 0; i < kAttributeNames.size(); ++i) {
    if (kAttributeNames[i] == name) return i;
  }
  return std::nullopt;
}

bool AttributeSet::get(std::string_view name) const {
  const auto i = attribute_index(name);
  if (!i) throw ValidationError("unknown attribute " + std::string(name));
  return flags[*i];
}

void AttributeSet::set(std::string_view name, bool on) {
  const auto i = attribute_index(name);
  if (!i) throw ValidationError("unknown attribute " + std::string(name));
  flags[*i] = on;
}

AttributeResult compute_attributes(std::span<const FrameAnnotation> stream, const ErpDims& d) {
  if (stream.empty()) throw ValidationError("attribute rules need at least one frame");
  const std::size_t n = stream.size();
  auto need_box = [&](std::size_t i, const char* rule) -> const Bbox& {
    if (!stream[i].bbox) {
      throw ValidationError(std::string("attribute ") + rule + " needs a BBox on frame " +
                            std::to_string(stream[i].frame));
    }
    return *stream[i].bbox;
  };
  auto need_fov = [&](std::size_t i, const char* rule) -> const Bfov& {
    if (!stream[i].bfov) {
      throw ValidationError(std::string("attribute ") + rule + " needs a BFoV on frame " +
                            std::to_string(stream[i].frame));
    }
    return *stream[i].bfov;
  };
  auto outside = [](double r) { return r < 0.5 || r > 2.0; };

  AttributeResult res;
  auto add = [&](const char* name, auto&& pred) {
    AttributeTrace tr{name, std::vector<bool>(n, false)};
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
      tr.per_frame[i] = pred(i, name);
      any = any || tr.per_frame[i];
    }
    res.set.set(name, any);
    res.traces.push_back(std::move(tr));
  };

  const double W = d.width();
  add("ARC", [&](std::size_t i, const char* r) {
    const Bbox& f = need_box(0, r);
    const Bbox& b = need_box(i, r);
    return outside((b.w / b.h) / (f.w / f.h));
  });
  add("SV", [&](std::size_t i, const char* r) {
    const Bbox& f = need_box(0, r);
    const Bbox& b = need_box(i, r);
    return outside((b.w * b.h) / (f.w * f.h));
  });
  add("FM", [&](std::size_t i, const char* r) {
    if (i == 0) return (void)need_box(0, r), false;
    const Bbox& prev = need_box(i - 1, r);
    const Bbox& cur = need_box(i, r);
    double dx = std::abs(wrap_mod(cur.cx - prev.cx, W));
    dx = std::min(dx, W - dx);
    return std::hypot(dx, cur.cy - prev.cy) > std::sqrt(prev.w * prev.h);
  });
  add("LR", [&](std::size_t i, const char* r) {
    const Bbox& b = need_box(i, r);
    return b.w * b.h < 1000.0;
  });
  add("HR", [&](std::size_t i, const char* r) {
    const Bbox& b = need_box(i, r);
    return b.w * b.h > 500.0 * 500.0;
  });
  add("CB", [&](std::size_t i, const char* r) {
    const Bbox& b = need_box(i, r);
    return b.cx - b.w / 2 < 0.0 || b.cx + b.w / 2 > W;
  });
  add("FMS", [&](std::size_t i, const char* r) {
    if (i == 0) return (void)need_fov(0, r), false;
    const Bfov& prev = need_fov(i - 1, r);
    const Bfov& cur = need_fov(i, r);
    return angular_distance(prev.center(), cur.center()) > std::max(prev.theta, prev.phi);
  });
  add("LFoV", [&](std::size_t i, const char* r) {
    const Bfov& f = need_fov(i, r);
    return f.theta > deg2rad(90.0) || f.phi > deg2rad(90.0);
  });
  double lat_min = kInf, lat_max = -kInf;
  add("LV", [&](std::size_t i, const char* r) {
    const Bfov& f = need_fov(i, r);
    lat_min = std::min(lat_min, f.clat);
    lat_max = std::max(lat_max, f.clat);
    return lat_max - lat_min > deg2rad(50.0);
  });
  add("HL", [&](std::size_t i, const char* r) {
    const Bfov& f = need_fov(i, r);
    return std::abs(f.clat) > deg2rad(60.0);
  });
  return res;
}

}  // namespace omni
