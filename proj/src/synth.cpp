#include "omnitrack/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "omnitrack/dataset_io.hpp"
#include "omnitrack/errors.hpp"
#include "omnitrack/mask_convert.hpp"
#include "omnitrack/metrics.hpp"
#include "omnitrack/parallel.hpp"
#include "omnitrack/region.hpp"

namespace omni {

namespace {

constexpr double kCellDeg = 10.0;  // checkerboard cell size

struct Preset {
  std::string_view name;
  Trajectory trajectory;
};

constexpr Preset kPresets[] = {
    {"equator", Trajectory::kEquator}, {"greatcircle", Trajectory::kGreatCircle},
    {"latsweep", Trajectory::kLatSweep}, {"seam", Trajectory::kSeam},
    {"pole", Trajectory::kPole},         {"grow", Trajectory::kGrow},
};

double parse_value(std::string_view key, std::string_view v) {
  double out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ValidationError("scenario: bad value for " + std::string(key) + ": '" + std::string(v) + "'");
  }
  return out;
}

int as_int(std::string_view key, double v) {
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw ValidationError("scenario: " + std::string(key) + " must be an integer");
  }
  return static_cast<int>(v);
}

}  // namespace

void Scenario::validate() const {
  if (width < 16 || width % 2 != 0) throw ValidationError("scenario: width must be even and >= 16");
  if (frames < 1) throw ValidationError("scenario: frames must be >= 1");
  if (!(radius_deg > 0 && radius_deg < 90)) throw ValidationError("scenario: radius must lie in (0, 90) deg");
  if (trajectory == Trajectory::kGrow && !(end_radius_deg > 0 && end_radius_deg < 90)) {
    throw ValidationError("scenario: end_radius must lie in (0, 90) deg");
  }
  if (!(grow_until > 0 && grow_until <= 1)) throw ValidationError("scenario: grow_until must lie in (0, 1]");
  if (std::abs(start_lat_deg) > 90 || std::abs(end_lat_deg) > 90) {
    throw ValidationError("scenario: latitudes must lie in [-90, 90] deg");
  }
}

Scenario parse_scenario(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string_view name = spec.substr(0, colon);
  Scenario s;
  bool found = false;
  for (const Preset& p : kPresets) {
    if (p.name == name) {
      s.trajectory = p.trajectory;
      found = true;
    }
  }
  if (!found) {
    throw ValidationError("unknown scenario '" + std::string(name) +
                          "' (expected equator, greatcircle, latsweep, seam, pole or grow)");
  }
  s.name = std::string(name);
  switch (s.trajectory) {
    case Trajectory::kSeam:
      s.start_lon_deg = 150.0;
      break;
    case Trajectory::kGreatCircle:
      s.start_lon_deg = -60.0;
      break;
    case Trajectory::kPole:
      s.speed_deg = 0.5;
      break;
    case Trajectory::kGrow:
      s.speed_deg = 0.25;
      break;
    default:
      break;
  }
  if (colon != std::string_view::npos) {
    std::string_view rest = spec.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view kv = rest.substr(0, comma);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      const auto eq = kv.find('=');
      if (eq == std::string_view::npos) {
        throw ValidationError("scenario: expected key=value, got '" + std::string(kv) + "'");
      }
      const std::string_view key = kv.substr(0, eq);
      const double v = parse_value(key, kv.substr(eq + 1));
      if (key == "frames") s.frames = as_int(key, v);
      else if (key == "width") s.width = as_int(key, v);
      else if (key == "radius") s.radius_deg = v;
      else if (key == "end_radius") s.end_radius_deg = v;
      else if (key == "speed") s.speed_deg = v;
      else if (key == "lon") s.start_lon_deg = v;
      else if (key == "lat") s.start_lat_deg = v;
      else if (key == "end_lat") s.end_lat_deg = v;
      else if (key == "tilt") s.tilt_deg = v;
      else if (key == "grow_until") s.grow_until = v;
      else if (key == "seed") s.seed = static_cast<std::uint64_t>(as_int(key, v));
      else throw ValidationError("scenario: unknown key '" + std::string(key) + "'");
    }
  }
  s.validate();
  return s;
}

TruthDisk truth_at(const Scenario& s, int frame) {
  const double t = frame - 1;
  const double span = std::max(1, s.frames - 1);
  const double along = deg2rad(s.start_lon_deg + s.speed_deg * t);
  TruthDisk d;
  d.radius = deg2rad(s.radius_deg);
  switch (s.trajectory) {
    case Trajectory::kEquator:
    case Trajectory::kSeam:
      d.lon = wrap_lon(along);
      d.lat = deg2rad(s.start_lat_deg);
      break;
    case Trajectory::kGreatCircle: {
      const LonLat p = vec_to_sph(rot_z(deg2rad(s.tilt_deg)) * sph_to_vec({along, 0.0}));
      d.lon = p.lon;
      d.lat = p.lat;
      break;
    }
    case Trajectory::kLatSweep:
      d.lon = wrap_lon(deg2rad(s.start_lon_deg));
      d.lat = deg2rad(s.start_lat_deg + (s.end_lat_deg - s.start_lat_deg) * t / span);
      break;
    case Trajectory::kPole: {
      const double u = t / span;  // up and back down
      const double w = u < 0.5 ? 2 * u : 2 - 2 * u;
      d.lon = wrap_lon(along);
      d.lat = deg2rad(s.start_lat_deg + (s.end_lat_deg - s.start_lat_deg) * w);
      break;
    }
    case Trajectory::kGrow: {
      const double u = std::min(1.0, t / (s.grow_until * span));
      d.lon = wrap_lon(along);
      d.lat = deg2rad(s.start_lat_deg);
      d.radius = deg2rad(s.radius_deg + (s.end_radius_deg - s.radius_deg) * u);
      break;
    }
  }
  return d;
}

Renderer::Renderer(const Scenario& s) : s_(s), background_(s.width, s.height(), 3) {
  s_.validate();
  const ErpDims d = s_.dims();
  const int W = d.width(), H = d.height();
  dirs_.resize(static_cast<std::size_t>(W) * H);
  for (int r = 0; r < H; ++r) {
    for (int c = 0; c < W; ++c) dirs_[static_cast<std::size_t>(r) * W + c] = pixel_dir(r, c, d);
  }
  const int cols = static_cast<int>(std::ceil(360.0 / kCellDeg));
  const int rows = static_cast<int>(std::ceil(180.0 / kCellDeg));
  std::mt19937_64 rng(s_.seed);
  std::uniform_int_distribution<int> jitter(-18, 18);
  std::vector<int> tone(static_cast<std::size_t>(cols) * rows);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) tone[i * cols + j] = ((i + j) % 2 ? 150 : 90) + jitter(rng);
  }
  for (int r = 0; r < H; ++r) {
    const int ci = std::min(rows - 1, static_cast<int>((r + 0.5) / H * 180.0 / kCellDeg));
    std::uint8_t* row = background_.row(r);
    for (int c = 0; c < W; ++c) {
      const int cj = std::min(cols - 1, static_cast<int>((c + 0.5) / W * 360.0 / kCellDeg));
      const int t = tone[ci * cols + cj];
      row[3 * c + 0] = static_cast<std::uint8_t>(t);
      row[3 * c + 1] = static_cast<std::uint8_t>(t + 10);
      row[3 * c + 2] = static_cast<std::uint8_t>(t + 25);
    }
  }
}

RenderedFrame Renderer::render(const TruthDisk& disk) const {
  const ErpDims d = s_.dims();
  const int W = d.width();
  RenderedFrame out{background_, Mask(d)};
  const Vec3 c = disk.center();
  const double cos_r = std::cos(disk.radius);
  // Target texture: concentric rings plus a spoke pattern, in the disk frame.
  const Rotation to_disk = view_rotation(disk.lon, disk.lat, 0.0).transposed();
  for (const RowSpan& s : cap_spans(d, c, disk.radius)) {
    std::uint8_t* row = out.image.row(s.row);
    for (int k = 0; k < s.count; ++k) {
      const int j = static_cast<int>(wrap_mod(s.begin + k, W));
      const Vec3& v = dirs_[static_cast<std::size_t>(s.row) * W + j];
      if (dot(v, c) < cos_r) continue;
      out.mask.set(s.row, j, true);
      const Vec3 l = to_disk * v;
      const double rho = std::acos(std::clamp(l.z, -1.0, 1.0)) / disk.radius;
      const double ang = std::atan2(l.y, l.x);
      const bool ring = static_cast<int>(std::floor(rho * 4)) % 2 == 0;
      const bool spoke = static_cast<int>(std::floor((ang + kPi) / (kPi / 6))) % 2 == 0;
      const int shade = (ring ? 30 : 0) + (spoke ? 20 : 0);
      row[3 * j + 0] = static_cast<std::uint8_t>(200 + shade);
      row[3 * j + 1] = static_cast<std::uint8_t>(40 + shade);
      row[3 * j + 2] = static_cast<std::uint8_t>(30);
    }
  }
  return out;
}

void generate(const Scenario& s, const std::filesystem::path& out_dir, int jobs) {
  s.validate();
  namespace fs = std::filesystem;
  const SequenceLayout seq(out_dir);
  std::error_code ec;
  for (const fs::path& p : {out_dir, out_dir / "frames", out_dir / "masks"}) {
    fs::create_directories(p, ec);
    if (ec) throw IoError("cannot create " + p.string() + ": " + ec.message());
  }
  const ErpDims d = s.dims();
  const Renderer renderer(s);
  const auto n = static_cast<std::size_t>(s.frames);
  std::vector<TruthDisk> truth(n);
  std::vector<std::optional<Bbox>> bbox(n), rbbox(n);
  std::vector<std::optional<Bfov>> bfov(n), rbfov(n);

  parallel_for(n, jobs, [&](std::size_t i) {
    const int frame = static_cast<int>(i) + 1;
    truth[i] = truth_at(s, frame);
    const RenderedFrame f = renderer.render(truth[i]);
    write_png(seq.frame_path(frame), f.image, 1);
    write_mask(seq.mask_path(frame), f.mask);
    bbox[i] = mask_to_bbox(f.mask, false);
    rbbox[i] = mask_to_bbox(f.mask, true);
    bfov[i] = mask_to_bfov(f.mask, false);
    rbfov[i] = mask_to_bfov(f.mask, true);
  });

  write_bbox_file(seq.annotation_path(Repr::kBbox), bbox, "cx,cy,w,h,gamma_deg");
  write_bbox_file(seq.annotation_path(Repr::kRbbox), rbbox, "cx,cy,w,h,gamma_deg");
  write_bfov_file(seq.annotation_path(Repr::kBfov), bfov, "clon_deg,clat_deg,theta_deg,phi_deg,gamma_deg");
  write_bfov_file(seq.annotation_path(Repr::kRbfov), rbfov, "clon_deg,clat_deg,theta_deg,phi_deg,gamma_deg");

  std::vector<FrameAnnotation> stream(n);
  for (std::size_t i = 0; i < n; ++i) {
    stream[i].frame = static_cast<int>(i) + 1;
    stream[i].bbox = bbox[i];
    stream[i].bfov = bfov[i];
  }
  write_attributes(seq.attributes_path(), compute_attributes(stream, d).set);
  write_meta(seq.meta_path(), {s.name, d.width(), d.height(), 30.0, s.frames});
  write_truth(seq.truth_path(), truth);
}

std::vector<TruthDisk> read_truth(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<TruthDisk> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    double lon = 0, lat = 0, radius = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &lon, &lat, &radius) != 3) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": expected lon,lat,radius");
    }
    rows.push_back({deg2rad(lon), deg2rad(lat), deg2rad(radius)});
  }
  return rows;
}

void write_truth(const std::filesystem::path& path, const std::vector<TruthDisk>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "# lon_deg,lat_deg,radius_deg\n";
  char buf[128];
  for (const TruthDisk& t : rows) {
    std::snprintf(buf, sizeof buf, "%.12f,%.12f,%.12f\n", rad2deg(t.lon), rad2deg(t.lat),
                  rad2deg(t.radius));
    out << buf;
  }
}

}  // namespace omni
