#pragma once

// One-pass tracking loop: crop a search region around the previous
// estimate, let a local tracker find the target in the unwarped image and
// map its box back onto the sphere.

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "omnitrack/adapter.hpp"
#include "omnitrack/annotations.hpp"
#include "omnitrack/image.hpp"
#include "omnitrack/region.hpp"

namespace omni {

struct HarnessConfig {
  double context_scale = 2.0;          // search FoV = k * estimated FoV
  double min_fov = deg2rad(30.0);      // per axis
  double max_theta = kTwoPi;
  double max_phi = kPi;
  double max_tangent_fov = deg2rad(179.0);  // force-tangent only
  ResolutionPolicy resolution;
  ModeOverride mode = ModeOverride::kNone;
  int outline_samples = 64;  // per local box edge
  /// When set, a JSON description of the current search region is written
  /// here before every init/track request.
  std::filesystem::path sidecar;
  int jobs = 1;  // unwarp threads

  /// Throws ValidationError unless k >= 1 and min <= max.
  void validate() const;
};

struct TrackStep {
  int frame = 0;
  bool failed = false;
  std::string error;
  Bfov search;
  RegionMode mode = RegionMode::kTangent;
  int local_width = 0;
  int local_height = 0;
  std::optional<Bbox> local_box;
  double score = 0.0;
  Bbox bbox;
  Bbox rbbox;
  Bfov bfov;
  Bfov rbfov;
  double wall_ms = 0.0;
};

/// Frames are loaded lazily, 1-based.
struct FrameSource {
  ErpDims dims;
  int count = 0;
  std::function<Image(int)> load;
};

/// Previous estimate recentered and enlarged by k, gamma dropped, clamped to
/// the configured limits.
Bfov search_region(const Bfov& estimate, const HarnessConfig& cfg);

/// BFoV of a pixel box through densely sampled boundary points.
Bfov bbox_to_init_bfov(const Bbox& b, const ErpDims& d);

/// The BFoV a run starts from: bfov, else rbfov, else one of the boxes.
Bfov init_bfov(const FrameAnnotation& init, const ErpDims& d);

/// Box of the region of `target` seen in the local image of `rm`.
Bbox project_region_box(const Bfov& target, const RegionMap& rm);

/// Maps a local box back to all four global representations.
void back_project(const Bbox& local_box, const RegionMap& rm, int outline_samples, TrackStep& step);

/// Step 0 is the initialization frame; later steps are tracked. Adapter
/// failures mark the step failed and carry the previous estimate over.
std::vector<TrackStep> run_ope(const FrameSource& frames, const FrameAnnotation& init,
                               const HarnessConfig& cfg, TrackerAdapter& adapter);

/// Sidecar file contents read back by cooperating adapters.
struct SearchSidecar {
  int frame = 0;
  Bfov search;
  RegionMode mode = RegionMode::kTangent;
  int width = 0;
  int height = 0;
  int erp_width = 0;
  int erp_height = 0;

  RegionMap region() const;
};

void write_sidecar(const std::filesystem::path& path, const SearchSidecar& s);
SearchSidecar read_sidecar(const std::filesystem::path& path);

}  // namespace omni
