#include "omnitrack/mask_convert.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "omnitrack/errors.hpp"
#include "omnitrack/geometry2d.hpp"
#include "omnitrack/region.hpp"

namespace omni {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// Horizontal run of set pixels, columns [begin, end) of one row.
struct Run {
  int row;
  int begin;
  int end;
};

// Set pixels as runs, labeled into 4-connected segments with seam wrap.
struct RunSegments {
  std::vector<Run> runs;
  std::vector<int> run_label;
  std::vector<std::size_t> sizes;
  int largest = -1;
};

RunSegments segment_runs(const Mask& m) {
  const int W = m.width(), H = m.height();
  RunSegments out;
  std::vector<std::size_t> row_start(static_cast<std::size_t>(H) + 1, 0);
  const std::uint8_t* bits = m.bits().data();
  for (int r = 0; r < H; ++r) {
    row_start[r] = out.runs.size();
    const std::uint8_t* row = bits + static_cast<std::size_t>(r) * W;
    int c = 0;
    while (c < W) {
      const auto* hit = static_cast<const std::uint8_t*>(std::memchr(row + c, 1, W - c));
      if (!hit) break;
      const int b = static_cast<int>(hit - row);
      int e = b;
      while (e < W && row[e]) ++e;
      out.runs.push_back({r, b, e});
      c = e;
    }
  }
  row_start[H] = out.runs.size();

  UnionFind uf(out.runs.size());
  for (int r = 0; r < H; ++r) {
    const std::size_t a0 = row_start[r], a1 = row_start[r + 1];
    if (a1 - a0 >= 2 && out.runs[a0].begin == 0 && out.runs[a1 - 1].end == W) {
      uf.unite(static_cast<int>(a0), static_cast<int>(a1 - 1));
    }
    if (r + 1 == H) break;
    std::size_t i = a0, j = a1;
    const std::size_t j1 = row_start[r + 2];
    while (i < a1 && j < j1) {
      const Run& a = out.runs[i];
      const Run& b = out.runs[j];
      if (a.begin < b.end && b.begin < a.end) uf.unite(static_cast<int>(i), static_cast<int>(j));
      if (a.end < b.end) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  out.run_label.assign(out.runs.size(), -1);
  std::vector<int> root_to_label(out.runs.size(), -1);
  for (std::size_t i = 0; i < out.runs.size(); ++i) {
    const int root = uf.find(static_cast<int>(i));
    if (root_to_label[root] < 0) {
      root_to_label[root] = static_cast<int>(out.sizes.size());
      out.sizes.push_back(0);
    }
    out.run_label[i] = root_to_label[root];
    out.sizes[out.run_label[i]] += static_cast<std::size_t>(out.runs[i].end - out.runs[i].begin);
  }
  for (std::size_t s = 0; s < out.sizes.size(); ++s) {
    if (out.largest < 0 || out.sizes[s] > out.sizes[out.largest]) out.largest = static_cast<int>(s);
  }
  return out;
}

// Prefix sums of sin/cos of column-center longitudes.
struct ColumnTrig {
  std::vector<double> sin_sum, cos_sum;
  explicit ColumnTrig(int W) : sin_sum(W + 1, 0.0), cos_sum(W + 1, 0.0) {
    for (int c = 0; c < W; ++c) {
      const double lon = ((c + 0.5) / W - 0.5) * kTwoPi;
      sin_sum[c + 1] = sin_sum[c] + std::sin(lon);
      cos_sum[c + 1] = cos_sum[c] + std::cos(lon);
    }
  }
};

// Area-weighted sum of pixel-center directions over runs (label < 0: all).
Vec3 weighted_sum(const RunSegments& seg, const ErpDims& d, int label) {
  const ColumnTrig trig(d.width());
  Vec3 sum;
  for (std::size_t i = 0; i < seg.runs.size(); ++i) {
    if (label >= 0 && seg.run_label[i] != label) continue;
    const Run& r = seg.runs[i];
    const double lat = (0.5 - (r.row + 0.5) / d.height()) * kPi;
    const double w = pixel_solid_angle(r.row, d);
    const double cl = std::cos(lat);
    const double n = r.end - r.begin;
    sum += Vec3{cl * (trig.sin_sum[r.end] - trig.sin_sum[r.begin]), -std::sin(lat) * n,
                cl * (trig.cos_sum[r.end] - trig.cos_sum[r.begin])} *
           w;
  }
  return sum;
}

bool is_boundary(const Mask& m, int r, int c) {
  const int W = m.width(), H = m.height();
  if (r == 0 || r == H - 1) return true;
  return !m.at(r - 1, c) || !m.at(r + 1, c) || !m.at(r, (c + 1) % W) || !m.at(r, (c + W - 1) % W);
}

template <class Fn>
void for_each_boundary(const Mask& m, const RunSegments& seg, Fn&& fn) {
  for (const Run& run : seg.runs) {
    for (int c = run.begin; c < run.end; ++c) {
      if (is_boundary(m, run.row, c)) fn(run.row, c);
    }
  }
}

std::vector<bool> occupied_columns(const RunSegments& seg, int W) {
  std::vector<int> diff(static_cast<std::size_t>(W) + 1, 0);
  for (const Run& r : seg.runs) {
    ++diff[r.begin];
    --diff[r.end];
  }
  std::vector<bool> occ(static_cast<std::size_t>(W), false);
  int acc = 0;
  for (int c = 0; c < W; ++c) {
    acc += diff[c];
    occ[c] = acc > 0;
  }
  return occ;
}

// Horizontal extent, in columns, after mapping column c to (c - k) mod W.
int shifted_extent(const std::vector<bool>& occ, long k) {
  const int W = static_cast<int>(occ.size());
  int lo = W, hi = -1;
  for (int c = 0; c < W; ++c) {
    if (!occ[c]) continue;
    const int sc = static_cast<int>(wrap_mod(double(c - k), W));
    lo = std::min(lo, sc);
    hi = std::max(hi, sc);
  }
  return hi - lo + 1;
}

// Shift that centers the set columns once the widest empty circular run of
// columns sits at the seam.
long gap_shift(const std::vector<bool>& occ, int* extent) {
  const int W = static_cast<int>(occ.size());
  int best_len = 0, best_end = 0;  // best_end: first occupied column after the gap
  for (int start = 0; start < W; ++start) {
    if (occ[start] || !occ[(start + W - 1) % W]) continue;
    int len = 0;
    while (len < W && !occ[(start + len) % W]) ++len;
    if (len > best_len) {
      best_len = len;
      best_end = (start + len) % W;
    }
  }
  *extent = W - best_len;
  return best_end - (W - *extent) / 2;
}

Vec3 corner_dir(double u, double v, const ErpDims& d) { return sph_to_vec(pix_to_sph({u, v}, d)); }

}  // namespace

MaskSegments label_segments(const Mask& m) {
  const RunSegments seg = segment_runs(m);
  MaskSegments out;
  out.label.assign(m.bits().size(), -1);
  for (std::size_t i = 0; i < seg.runs.size(); ++i) {
    const Run& r = seg.runs[i];
    const std::size_t base = static_cast<std::size_t>(r.row) * m.width();
    std::fill(out.label.begin() + static_cast<long>(base + r.begin),
              out.label.begin() + static_cast<long>(base + r.end), seg.run_label[i]);
  }
  out.sizes = seg.sizes;
  out.largest = seg.largest;
  return out;
}

Vec3 pixel_dir(int row, int col, const ErpDims& d) {
  return sph_to_vec(pix_to_sph({col + 0.5, row + 0.5}, d));
}

double pixel_solid_angle(int row, const ErpDims& d) {
  const double top = (0.5 - double(row) / d.height()) * kPi;
  const double bot = (0.5 - double(row + 1) / d.height()) * kPi;
  return kTwoPi / d.width() * (std::sin(top) - std::sin(bot));
}

Mask rotate_mask(const Mask& m, const Rotation& r) {
  const ErpDims& d = m.dims();
  const int W = d.width(), H = d.height();
  const Rotation inv = r.transposed();
  Mask out(d);
  for (int row = 0; row < H; ++row) {
    for (int col = 0; col < W; ++col) {
      const PixCoord q = sph_to_pix(vec_to_sph(inv * pixel_dir(row, col, d)), d);
      const int sc = static_cast<int>(wrap_mod(std::floor(q.u), W));
      const int sr = std::clamp(static_cast<int>(std::floor(q.v)), 0, H - 1);
      if (m.at(sr, sc)) out.set(row, col, true);
    }
  }
  return out;
}

std::optional<Bbox> mask_to_bbox(const Mask& m, bool need_rotation) {
  if (m.empty()) return std::nullopt;
  const ErpDims& d = m.dims();
  const int W = d.width();

  const RunSegments seg = segment_runs(m);
  const Vec3 c1 = weighted_sum(seg, d, seg.largest);
  const double x1 = c1.norm() > 0 ? sph_to_pix(vec_to_sph(c1), d).u : W / 2.0;
  long k = std::lround(x1 - W / 2.0);

  const std::vector<bool> occ = occupied_columns(seg, W);
  int min_extent = 0;
  const long k_gap = gap_shift(occ, &min_extent);
  if (shifted_extent(occ, k) > min_extent) k = k_gap;

  std::vector<geom::Point2> corners;
  for_each_boundary(m, seg, [&](int r, int c) {
    const double sc = wrap_mod(double(c - k), W);
    corners.push_back({sc, double(r)});
    corners.push_back({sc + 1, double(r)});
    corners.push_back({sc, double(r + 1)});
    corners.push_back({sc + 1, double(r + 1)});
  });
  const geom::RotatedRect rect =
      need_rotation ? geom::min_area_rect(corners) : geom::bounding_rect(corners);
  double min_x = corners.front().x, max_x = min_x;
  for (const auto& p : corners) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
  }
  Bbox b{rect.cx + static_cast<double>(k), rect.cy, rect.w, rect.h, rect.angle};
  if (max_x - min_x >= W - 1) b.cx = rect.cx - min_x;
  return canonicalize_bbox(b, d);
}

std::optional<Bfov> mask_to_bfov(const Mask& m, bool need_rotation) {
  if (m.empty()) return std::nullopt;
  const ErpDims& d = m.dims();

  const RunSegments seg = segment_runs(m);
  Vec3 c1 = weighted_sum(seg, d, seg.largest);
  c1 = c1.norm() < 1e-12 ? Vec3{0, 0, 1} : normalized(c1);
  // Centroid of the whole mask; directions are rotation invariant, so this
  // equals the recentered centroid.
  Vec3 c2 = weighted_sum(seg, d, -1);
  c2 = c2.norm() < 1e-9 ? c1 : normalized(c2);

  std::vector<Vec3> corners;
  for_each_boundary(m, seg, [&](int r, int c) {
    corners.push_back(corner_dir(c, r, d));
    corners.push_back(corner_dir(c + 1, r, d));
    corners.push_back(corner_dir(c, r + 1, d));
    corners.push_back(corner_dir(c + 1, r + 1, d));
  });
  const double gamma = need_rotation ? estimate_gamma(corners, c2) : 0.0;
  return fit_bfov_extents(corners, c2, gamma);
}

}  // namespace omni
