#pragma once

// Omnidirectional tracking metrics and computed sequence attributes.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "omnitrack/annotations.hpp"
#include "omnitrack/sphere.hpp"

namespace omni {

/// Plain IoU of two boxes in pixel space. Rotated boxes are intersected by
/// convex polygon clipping. No wrap handling.
double iou_bbox(const Bbox& a, const Bbox& b);

/// max IoU over gt shifted by {0, -W, +W}.
double success_dual(const Bbox& gt, const Bbox& tr, const ErpDims& d);
/// min center distance (pixels) over gt shifted by {0, -W, +W}.
double precision_dual(const Bbox& gt, const Bbox& tr, const ErpDims& d);
/// Center displacement scaled by (1/w_gt, 1/h_gt), min over the shifts.
/// Throws DomainError for a zero-sized gt.
double normalized_precision_dual(const Bbox& gt, const Bbox& tr, const ErpDims& d);

/// Great-circle angle between two centers, in degrees.
double angle_precision(const LonLat& gt_center, const LonLat& tr_center);

/// Spherical IoU of the regions of a and b (gating rule applies to each),
/// measured on a lat-lon grid with exact cell areas. Grids are refined by
/// powers of two while the smaller region covers fewer than
/// `min_cells` cells, up to `max_width` columns.
struct SphereIouOptions {
  int grid_width = 1024;
  int min_cells = 64;
  int max_width = 16384;
  int subdivisions = 4;  // quadtree levels for cells cut by a boundary
};
double sphere_iou(const Bfov& a, const Bfov& b, const SphereIouOptions& opt = {});
/// Fixed-grid variant; no refinement.
double sphere_iou(const Bfov& a, const Bfov& b, const ErpDims& grid);

enum class Repr { kBbox, kRbbox, kBfov, kRbfov };
std::string_view repr_name(Repr r);
std::optional<Repr> parse_repr(std::string_view s);
inline bool is_box_repr(Repr r) { return r == Repr::kBbox || r == Repr::kRbbox; }

struct FramePair {
  FrameAnnotation gt;
  FrameAnnotation tr;
};

struct Curve {
  std::vector<double> thresholds;
  std::vector<double> rates;
  double auc = 0.0;  // mean of rates

  /// Rate at the threshold closest to t.
  double rate_at(double t) const;
};

/// Per-frame scores. Values are empty for metrics the representation does
/// not support; a missing tracker output scores as a failure (IoU 0,
/// infinite distance).
struct FrameScores {
  int frame = 0;
  bool scored = false;
  std::optional<double> s_dual;
  std::optional<double> p_dual;
  std::optional<double> np_dual;
  std::optional<double> p_angle;  // degrees
  std::optional<double> s_sphere;
};

struct MetricReport {
  Repr repr = Repr::kBbox;
  int frames_scored = 0;
  std::vector<FrameScores> frames;
  std::optional<Curve> success;        // S_dual, thresholds 0..1 step 0.01
  std::optional<Curve> precision;      // P_dual, 0..50 px
  std::optional<Curve> norm_precision; // normalized P_dual, 0..0.5 step 0.01
  std::optional<Curve> angle;          // P_angle, 0..10 deg step 0.1
  std::optional<Curve> sphere_success; // S_sphere, thresholds 0..1 step 0.01

  std::optional<double> s_dual_auc;
  std::optional<double> p_dual_20;
  std::optional<double> np_dual_auc;
  std::optional<double> p_angle_3;
  std::optional<double> s_sphere_auc;
};

struct EvalOptions {
  SphereIouOptions sphere;
  int jobs = 1;
};

/// One-pass evaluation. Frame pairs are in sequence order; the first is
/// the initialization frame and is not scored, nor is any frame whose gt
/// lacks the representation. Throws ValidationError with fewer than 2 pairs.
MetricReport ope_evaluate(std::span<const FramePair> pairs, const ErpDims& d, Repr repr,
                          const EvalOptions& opt = {});

// Attributes ---------------------------------------------------------------

inline constexpr std::array<std::string_view, 20> kAttributeNames = {
    "IV", "BC",  "DEF", "MB",  "CM",   "ROT", "POC", "FOC", "ARC", "SV",
    "FM", "LR",  "HR",  "SA",  "CB",   "FMS", "LFoV", "LV", "HL",  "LD"};

inline constexpr std::array<std::string_view, 10> kComputedAttributes = {
    "ARC", "SV", "FM", "LR", "HR", "CB", "FMS", "LFoV", "LV", "HL"};

std::optional<std::size_t> attribute_index(std::string_view name);

struct AttributeSet {
  std::array<bool, 20> flags{};

  bool get(std::string_view name) const;
  void set(std::string_view name, bool on);
};

struct AttributeTrace {
  std::string name;
  std::vector<bool> per_frame;
};

struct AttributeResult {
  AttributeSet set;                  // only computed flags are touched
  std::vector<AttributeTrace> traces;
};

/// Computed attributes of an annotation stream. Box rules read `bbox`,
/// sphere rules read `bfov`; a frame lacking one throws ValidationError
/// naming the rule.
AttributeResult compute_attributes(std::span<const FrameAnnotation> stream, const ErpDims& d);

}  // namespace omni
