#include "omnitrack/annotations.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <utility>

#include "omnitrack/errors.hpp"

namespace omni {

namespace {
constexpr double kAngleSlack = 1e-12;
}

Mask::Mask(ErpDims dims)
    : dims_(dims), bits_(static_cast<std::size_t>(dims.width()) * dims.height(), 0) {}

Mask::Mask(ErpDims dims, std::vector<std::uint8_t> bits) : dims_(dims), bits_(std::move(bits)) {
  if (bits_.size() != static_cast<std::size_t>(dims.width()) * dims.height()) {
    throw ValidationError("mask buffer size does not match its dims");
  }
  for (auto& b : bits_) b = b ? 1 : 0;
}

bool Mask::empty() const {
  return std::none_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; });
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

Bbox canonicalize_bbox(const Bbox& b, const ErpDims& d) {
  if (!(b.w > 0.0) || !(b.h > 0.0)) {
    throw ValidationError("bbox width and height must be positive (w=" + std::to_string(b.w) +
                          ", h=" + std::to_string(b.h) + ")");
  }
  if (!std::isfinite(b.cx) || !std::isfinite(b.cy) || !std::isfinite(b.gamma)) {
    throw ValidationError("bbox has non-finite fields");
  }
  Bbox out = b;
  out.cx = wrap_mod(b.cx, d.width());

  // Remove the fewest quarter turns that land gamma in (-pi/2, pi/2]; each
  // quarter turn exchanges the roles of w and h.
  const auto lo = static_cast<long long>(std::ceil((b.gamma - kHalfPi) / kHalfPi));
  long long best = lo;
  bool found = false;
  for (long long n = lo; n <= lo + 1; ++n) {
    const double g = b.gamma - static_cast<double>(n) * kHalfPi;
    if (g > -kHalfPi && g <= kHalfPi && (!found || std::llabs(n) < std::llabs(best))) {
      best = n;
      found = true;
    }
  }
  out.gamma = b.gamma - static_cast<double>(best) * kHalfPi;
  if (out.gamma <= -kHalfPi) out.gamma += kPi;
  if (out.gamma > kHalfPi) out.gamma -= kPi;
  if (best % 2 != 0) std::swap(out.w, out.h);
  return out;
}

Bfov validate_bfov(const Bfov& f) {
  auto bad = [](const std::string& what) { throw ValidationError("invalid BFoV: " + what); };
  if (!std::isfinite(f.clon) || !std::isfinite(f.clat) || !std::isfinite(f.theta) ||
      !std::isfinite(f.phi) || !std::isfinite(f.gamma)) {
    bad("non-finite field");
  }
  if (!(f.theta > 0.0) || f.theta > kTwoPi + kAngleSlack) {
    bad("theta=" + std::to_string(rad2deg(f.theta)) + " deg outside (0, 360]");
  }
  if (!(f.phi > 0.0) || f.phi > kPi + kAngleSlack) {
    bad("phi=" + std::to_string(rad2deg(f.phi)) + " deg outside (0, 180]");
  }
  if (std::abs(f.clat) > kHalfPi + kAngleSlack) {
    bad("clat=" + std::to_string(rad2deg(f.clat)) + " deg outside [-90, 90]");
  }
  return f;
}

}  // namespace omni
