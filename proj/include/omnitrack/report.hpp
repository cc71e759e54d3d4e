#pragma once

// Serialization of evaluation reports and tracking runs, and boundary
// overlays for visual inspection.

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include <json.hpp>

#include "omnitrack/annotations.hpp"
#include "omnitrack/harness.hpp"
#include "omnitrack/image.hpp"
#include "omnitrack/metrics.hpp"

namespace omni {

nlohmann::ordered_json report_to_json(const MetricReport& r);

/// "S_dual(AUC)=0.731 P_dual=0.802 ..." with three decimals; only the
/// scalars the representation supports.
std::string headline(const MetricReport& r);

/// Writes bbox.txt, rbbox.txt, bfov.txt, rbfov.txt and steps.json.
void write_run(const std::filesystem::path& dir, std::span<const TrackStep> steps);

using Rgb = std::array<std::uint8_t, 3>;

/// Outline of a box on the ERP image, wrapped horizontally.
void draw_bbox(Image& img, const Bbox& b, Rgb color, int thickness = 2);
/// Outline of a BFoV region, traced through its boundary directions.
void draw_bfov(Image& img, const Bfov& f, Rgb color, int thickness = 2);

}  // namespace omni
