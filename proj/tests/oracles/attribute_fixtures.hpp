#pragma once

// Hand-built annotation streams for the computed attributes: for every rule
// one stream that satisfies its condition and one just on the other side.

#include <initializer_list>
#include <string>
#include <vector>

#include "omnitrack/annotations.hpp"
#include "omnitrack/metrics.hpp"

namespace fixtures {

using omni::Bbox;
using omni::Bfov;
using omni::FrameAnnotation;

inline const omni::ErpDims kDims(3840, 1920);

inline Bfov fov_deg(double clon, double clat, double th, double ph) {
  return {omni::deg2rad(clon), omni::deg2rad(clat), omni::deg2rad(th), omni::deg2rad(ph), 0.0};
}

inline std::vector<FrameAnnotation> boxes(std::initializer_list<Bbox> bs) {
  std::vector<FrameAnnotation> out;
  int t = 1;
  for (const Bbox& b : bs) {
    FrameAnnotation a;
    a.frame = t++;
    a.bbox = b;
    a.bfov = fov_deg(0, 0, 30, 30);
    out.push_back(a);
  }
  return out;
}

inline std::vector<FrameAnnotation> fovs(std::initializer_list<Bfov> fs) {
  std::vector<FrameAnnotation> out;
  int t = 1;
  for (const Bfov& f : fs) {
    FrameAnnotation a;
    a.frame = t++;
    a.bfov = f;
    a.bbox = Bbox{1000, 900, 100, 100, 0};
    out.push_back(a);
  }
  return out;
}

struct AttributeCase {
  std::string name;
  std::string condition;
  std::vector<FrameAnnotation> positive;
  std::vector<FrameAnnotation> negative;
};

inline std::vector<AttributeCase> attribute_cases() {
  return {
      {"ARC", "aspect ratio change outside [0.5, 2]",
       boxes({{1000, 900, 100, 100, 0}, {1000, 900, 210, 100, 0}}),
       boxes({{1000, 900, 100, 100, 0}, {1000, 900, 190, 100, 0}})},
      {"SV", "area ratio outside [0.5, 2]",
       boxes({{1000, 900, 100, 100, 0}, {1000, 900, 70, 70, 0}}),
       boxes({{1000, 900, 100, 100, 0}, {1000, 900, 72, 72, 0}})},
      {"FM", "center motion above sqrt(w h), across the seam",
       boxes({{3830, 900, 100, 100, 0}, {91, 900, 100, 100, 0}}),
       boxes({{3830, 900, 100, 100, 0}, {89, 900, 100, 100, 0}})},
      {"LR", "area below 1000 px", boxes({{1000, 900, 30, 33, 0}}), boxes({{1000, 900, 40, 25, 0}})},
      {"HR", "area above 500^2 px", boxes({{1000, 900, 501, 500, 0}}), boxes({{1000, 900, 500, 500, 0}})},
      {"CB", "box crosses the frame border", boxes({{3800, 900, 100, 100, 0}}),
       boxes({{3790, 900, 100, 100, 0}})},
      {"FMS", "angular motion above the previous max(theta, phi)",
       fovs({fov_deg(0, 0, 10, 20), fov_deg(21, 0, 10, 20)}),
       fovs({fov_deg(0, 0, 10, 20), fov_deg(19, 0, 10, 20)})},
      {"LFoV", "theta or phi above 90 deg", fovs({fov_deg(0, 0, 100, 20)}), fovs({fov_deg(0, 0, 90, 90)})},
      {"LV", "center latitude range above 50 deg",
       fovs({fov_deg(0, -30, 10, 10), fov_deg(0, 0, 10, 10), fov_deg(0, 21, 10, 10)}),
       fovs({fov_deg(0, -30, 10, 10), fov_deg(0, 19, 10, 10)})},
      {"HL", "|latitude| above 60 deg", fovs({fov_deg(0, 0, 10, 10), fov_deg(0, -65, 10, 10)}),
       fovs({fov_deg(0, 60, 10, 10), fov_deg(0, -60, 10, 10)})},
  };
}

}  // namespace fixtures
