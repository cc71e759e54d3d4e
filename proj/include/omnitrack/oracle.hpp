#pragma once

// Reference adapter for synthetic sequences: answers every request with the
// box of the analytic target as seen in the current local image.

#include <filesystem>
#include <iosfwd>

#include "omnitrack/annotations.hpp"
#include "omnitrack/region.hpp"
#include "omnitrack/synth.hpp"

namespace omni {

struct OracleOptions {
  std::filesystem::path sequence;  // directory holding truth.txt
  std::filesystem::path sidecar;   // search region file written by the harness
  double bias_deg = 0.0;           // great-circle offset toward local east
  bool quantize = false;           // snap box edges outward to whole pixels
  int boundary_samples = 720;
};

/// Disk center moved by `bias` radians along the local east direction.
TruthDisk biased(const TruthDisk& d, double bias);

/// Local box of a disk in the region `rm`.
Bbox disk_local_box(const TruthDisk& d, const RegionMap& rm, int samples = 720,
                    bool quantize = false);

/// Serves the adapter protocol on (in, out) until `bye` or end of input.
/// Returns a process exit code.
int serve_oracle(const OracleOptions& opt, std::istream& in, std::ostream& out);

}  // namespace omni
