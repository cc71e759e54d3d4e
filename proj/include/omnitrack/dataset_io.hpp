#pragma once

// On-disk sequence layout and annotation text formats.
//
//   <seq>/frames/000001.png ...   ERP frames, 1-based
//   <seq>/masks/000001.png ...    optional 8-bit masks (0 / 255)
//   <seq>/bbox.txt rbbox.txt      cx,cy,w,h,gamma_deg   (pixels, center-based)
//   <seq>/bfov.txt rbfov.txt      clon_deg,clat_deg,theta_deg,phi_deg,gamma_deg
//   <seq>/attributes.txt          NAME=0|1
//   <seq>/meta.txt                key=value (name, width, height, fps, frames)
//
// One frame per line; '#' starts a comment; `none` marks an absent frame.

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "omnitrack/annotations.hpp"
#include "omnitrack/metrics.hpp"

namespace omni {

namespace fs = std::filesystem;

std::string format_bbox(const Bbox& b);
std::string format_bfov(const Bfov& f);
/// Parses one data line. `none` gives nullopt. Throws ValidationError.
std::optional<Bbox> parse_bbox(std::string_view line);
std::optional<Bfov> parse_bfov(std::string_view line);

std::vector<std::optional<Bbox>> read_bbox_file(const fs::path& path);
std::vector<std::optional<Bfov>> read_bfov_file(const fs::path& path);
void write_bbox_file(const fs::path& path, std::span<const std::optional<Bbox>> rows,
                     std::string_view header = {});
void write_bfov_file(const fs::path& path, std::span<const std::optional<Bfov>> rows,
                     std::string_view header = {});

struct SequenceMeta {
  std::string name;
  int width = 0;
  int height = 0;
  double fps = 30.0;
  int frames = 0;

  ErpDims dims() const { return ErpDims(width, height); }
};

SequenceMeta read_meta(const fs::path& path);
void write_meta(const fs::path& path, const SequenceMeta& m);

AttributeSet read_attributes(const fs::path& path);
void write_attributes(const fs::path& path, const AttributeSet& a);

std::string annotation_file_name(Repr r);

/// A sequence directory.
class SequenceLayout {
 public:
  explicit SequenceLayout(fs::path dir) : dir_(std::move(dir)) {}

  const fs::path& dir() const { return dir_; }
  fs::path frame_path(int frame) const;  // 1-based
  fs::path mask_path(int frame) const;
  fs::path annotation_path(Repr r) const { return dir_ / annotation_file_name(r); }
  fs::path meta_path() const { return dir_ / "meta.txt"; }
  fs::path attributes_path() const { return dir_ / "attributes.txt"; }
  fs::path truth_path() const { return dir_ / "truth.txt"; }

  SequenceMeta meta() const;
  /// Frame annotations for every representation file present. Line counts
  /// must agree with meta.frames. Masks are not loaded.
  std::vector<FrameAnnotation> load_annotations() const;

 private:
  fs::path dir_;
};

/// Reads an annotation file for `repr` into FrameAnnotations (frames 1..n).
std::vector<FrameAnnotation> load_results(const fs::path& path, Repr repr);

/// Reads an 8-bit mask PNG; any nonzero value is set.
Mask read_mask(const fs::path& path);
void write_mask(const fs::path& path, const Mask& m);

std::string frame_file_name(int frame);

}  // namespace omni
