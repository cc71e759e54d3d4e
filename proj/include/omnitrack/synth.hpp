#pragma once

// Synthetic 360 sequences with exact ground truth: a textured geodesic disk
// moving over a checkerboard sphere.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "omnitrack/annotations.hpp"
#include "omnitrack/image.hpp"
#include "omnitrack/sphere.hpp"

namespace omni {

enum class Trajectory { kGreatCircle, kEquator, kLatSweep, kSeam, kPole, kGrow };

struct Scenario {
  std::string name = "equator";
  Trajectory trajectory = Trajectory::kEquator;
  int width = 2048;
  int frames = 200;
  double radius_deg = 20.0;      // disk radius (start radius for grow)
  double end_radius_deg = 75.0;  // grow only
  double grow_until = 0.6;       // fraction of the sequence spent growing
  double speed_deg = 1.0;        // angular step per frame along the path
  double start_lon_deg = 0.0;
  double start_lat_deg = 0.0;
  double end_lat_deg = 85.0;     // lat sweep / pole
  double tilt_deg = 30.0;        // great-circle inclination
  std::uint64_t seed = 1;

  int height() const { return width / 2; }
  ErpDims dims() const { return ErpDims(width, width / 2); }
  /// Throws ValidationError for unusable parameters.
  void validate() const;
};

/// Parses `name[:key=value,...]`, e.g. "seam:frames=100,radius=15".
/// Names: equator, greatcircle, latsweep, seam, pole, grow.
Scenario parse_scenario(std::string_view spec);

/// Analytic target on one frame.
struct TruthDisk {
  double lon = 0.0;  // radians
  double lat = 0.0;
  double radius = 0.0;

  Vec3 center() const { return sph_to_vec({lon, lat}); }
};

/// Target of frame t (1-based).
TruthDisk truth_at(const Scenario& s, int frame);

struct RenderedFrame {
  Image image;
  Mask mask;
};

/// Renders frames; the background is computed once and reused.
class Renderer {
 public:
  explicit Renderer(const Scenario& s);
  RenderedFrame render(const TruthDisk& disk) const;

 private:
  Scenario s_;
  std::vector<Vec3> dirs_;
  Image background_;
};

/// Writes the whole sequence directory (frames, masks, annotation files,
/// attributes, meta, truth). Existing files are overwritten.
void generate(const Scenario& s, const std::filesystem::path& out_dir, int jobs = 1);

std::vector<TruthDisk> read_truth(const std::filesystem::path& path);
void write_truth(const std::filesystem::path& path, const std::vector<TruthDisk>& rows);

}  // namespace omni
