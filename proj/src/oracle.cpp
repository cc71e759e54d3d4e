#include "omnitrack/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "omnitrack/adapter.hpp"
#include "omnitrack/errors.hpp"
#include "omnitrack/geometry2d.hpp"
#include "omnitrack/harness.hpp"

namespace omni {

using nlohmann::json;

namespace {

Vec3 east_of(const TruthDisk& d) { return {std::cos(d.lon), 0.0, -std::sin(d.lon)}; }
Vec3 north_of(const TruthDisk& d) {
  return {-std::sin(d.lat) * std::sin(d.lon), -std::cos(d.lat), -std::sin(d.lat) * std::cos(d.lon)};
}

}  // namespace

TruthDisk biased(const TruthDisk& d, double bias) {
  if (bias == 0.0) return d;
  const Vec3 c = d.center() * std::cos(bias) + east_of(d) * std::sin(bias);
  const LonLat p = vec_to_sph(c);
  return {p.lon, p.lat, d.radius};
}

Bbox disk_local_box(const TruthDisk& d, const RegionMap& rm, int samples, bool quantize) {
  const Vec3 c = d.center(), e = east_of(d), n = north_of(d);
  const double cr = std::cos(d.radius), sr = std::sin(d.radius);
  std::vector<geom::Point2> pts;
  pts.reserve(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) {
    const double a = kTwoPi * k / samples;
    const Vec3 v = c * cr + (e * std::cos(a) + n * std::sin(a)) * sr;
    const auto p = rm.to_local(v);
    if (!p) continue;
    pts.push_back({std::clamp(p->u, 0.0, double(rm.width())),
                   std::clamp(p->v, 0.0, double(rm.height()))});
  }
  if (pts.empty()) return {rm.width() / 2.0, rm.height() / 2.0, 1.0, 1.0, 0.0};
  double x0 = pts[0].x, x1 = x0, y0 = pts[0].y, y1 = y0;
  for (const auto& p : pts) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  if (quantize) {
    x0 = std::floor(x0);
    y0 = std::floor(y0);
    x1 = std::max(std::ceil(x1), x0 + 1);
    y1 = std::max(std::ceil(y1), y0 + 1);
  }
  return {(x0 + x1) / 2, (y0 + y1) / 2, std::max(x1 - x0, 1e-6), std::max(y1 - y0, 1e-6), 0.0};
}

int serve_oracle(const OracleOptions& opt, std::istream& in, std::ostream& out) {
  try {
    const std::vector<TruthDisk> truth = read_truth(opt.sequence / "truth.txt");
    const double bias = deg2rad(opt.bias_deg);
    while (auto msg = read_message(in)) {
      const std::string type = msg->value("type", std::string());
      if (type == "hello") {
        write_message(out, {{"type", "ready"}, {"name", "oracle"}});
      } else if (type == "init" || type == "track") {
        (void)read_payload(in, msg->at("image_bytes").get<std::size_t>());
        if (type == "init") {
          write_message(out, {{"type", "ok"}});
          continue;
        }
        const SearchSidecar side = read_sidecar(opt.sidecar);
        if (side.frame < 1 || side.frame > static_cast<int>(truth.size())) {
          throw ValidationError("sidecar frame " + std::to_string(side.frame) + " has no truth");
        }
        const RegionMap rm = side.region();
        const TruthDisk target = biased(truth[side.frame - 1], bias);
        const Bbox box = disk_local_box(target, rm, opt.boundary_samples, opt.quantize);
        write_message(out, {{"type", "result"}, {"bbox", bbox_to_json(box)}, {"score", 1.0}});
      } else if (type == "bye") {
        return 0;
      } else {
        write_message(out, {{"type", "error"}, {"message", "unknown message type '" + type + "'"}});
        return 1;
      }
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "oracle adapter: " << e.what() << '\n';
    write_message(out, {{"type", "error"}, {"message", e.what()}});
    return 1;
  }
}

}  // namespace omni
