#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

#include "omnitrack/dataset_io.hpp"
#include "omnitrack/errors.hpp"
#include "omnitrack/mask_convert.hpp"
#include "omnitrack/metrics.hpp"
#include "omnitrack/region.hpp"
#include "omnitrack/report.hpp"
#include "omnitrack/synth.hpp"

namespace py = pybind11;
using namespace omni;

namespace {

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

Image to_image(const U8Array& a) {
  if (a.ndim() != 2 && a.ndim() != 3) throw ValidationError("image must be HxW or HxWxC");
  const int h = static_cast<int>(a.shape(0)), w = static_cast<int>(a.shape(1));
  const int c = a.ndim() == 3 ? static_cast<int>(a.shape(2)) : 1;
  if (c != 1 && c != 3) throw ValidationError("image must have 1 or 3 channels");
  Image img(w, h, c);
  std::memcpy(img.data().data(), a.data(), img.data().size());
  return img;
}

U8Array from_image(const Image& img) {
  std::vector<py::ssize_t> shape{img.height(), img.width()};
  if (img.channels() > 1) shape.push_back(img.channels());
  U8Array out(shape);
  std::memcpy(out.mutable_data(), img.data().data(), img.data().size());
  return out;
}

Mask to_mask(const py::array_t<bool, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw ValidationError("mask must be a 2-D array");
  const ErpDims d(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
  std::vector<std::uint8_t> bits(a.data(), a.data() + a.size());
  return Mask(d, std::move(bits));
}

py::object report_dict(const MetricReport& r) {
  return py::module_::import("json").attr("loads")(report_to_json(r).dump());
}

Repr repr_or_throw(const std::string& s) {
  const auto r = parse_repr(s);
  if (!r) throw ValidationError("repr must be bbox, rbbox, bfov or rbfov");
  return *r;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Tracking toolkit for 360-degree equirectangular video";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<AdapterError>(m, "AdapterError", base.ptr());

  py::class_<LonLat>(m, "LonLat")
      .def(py::init<double, double>(), py::arg("lon"), py::arg("lat"))
      .def_readwrite("lon", &LonLat::lon)
      .def_readwrite("lat", &LonLat::lat)
      .def("__repr__", [](const LonLat& p) {
        return "LonLat(lon=" + std::to_string(p.lon) + ", lat=" + std::to_string(p.lat) + ")";
      });

  py::class_<Bbox>(m, "Bbox")
      .def(py::init([](double cx, double cy, double w, double h, double gamma) { return Bbox{cx, cy, w, h, gamma}; }),
           py::arg("cx"), py::arg("cy"), py::arg("w"), py::arg("h"), py::arg("gamma") = 0.0)
      .def_readwrite("cx", &Bbox::cx)
      .def_readwrite("cy", &Bbox::cy)
      .def_readwrite("w", &Bbox::w)
      .def_readwrite("h", &Bbox::h)
      .def_readwrite("gamma", &Bbox::gamma)
      .def("__repr__", [](const Bbox& b) { return "Bbox(" + format_bbox(b) + ")"; });

  py::class_<Bfov>(m, "Bfov")
      .def(py::init([](double clon, double clat, double theta, double phi, double gamma) {
             return Bfov{clon, clat, theta, phi, gamma};
           }),
           py::arg("clon"), py::arg("clat"), py::arg("theta"), py::arg("phi"), py::arg("gamma") = 0.0)
      .def_static("from_degrees",
                  [](double clon, double clat, double theta, double phi, double gamma) {
                    return Bfov{deg2rad(clon), deg2rad(clat), deg2rad(theta), deg2rad(phi), deg2rad(gamma)};
                  },
                  py::arg("clon"), py::arg("clat"), py::arg("theta"), py::arg("phi"), py::arg("gamma") = 0.0)
      .def_readwrite("clon", &Bfov::clon)
      .def_readwrite("clat", &Bfov::clat)
      .def_readwrite("theta", &Bfov::theta)
      .def_readwrite("phi", &Bfov::phi)
      .def_readwrite("gamma", &Bfov::gamma)
      .def("__repr__", [](const Bfov& f) { return "Bfov(" + format_bfov(f) + " deg)"; });

  m.def("sph_to_pix",
        [](double lon, double lat, int width) {
          const PixCoord p = sph_to_pix({lon, lat}, ErpDims(width, width / 2));
          return std::pair{p.u, p.v};
        },
        py::arg("lon"), py::arg("lat"), py::arg("width"));
  m.def("pix_to_sph",
        [](double u, double v, int width) { return pix_to_sph({u, v}, ErpDims(width, width / 2)); },
        py::arg("u"), py::arg("v"), py::arg("width"));
  m.def("angular_distance", py::overload_cast<const LonLat&, const LonLat&>(&angular_distance));
  m.def("select_region_mode",
        [](double theta, double phi) { return select_region_mode(theta, phi) == RegionMode::kTangent ? "tangent" : "sphere"; },
        py::arg("theta"), py::arg("phi"));

  m.def("unwarp",
        [](const U8Array& frame, const Bfov& f, bool force_tangent, int max_side) {
          const Image img = to_image(frame);
          ResolutionPolicy policy;
          policy.max_side = max_side;
          const RegionMap rm = build_region(f, ErpDims(img.width(), img.height()), policy,
                                            force_tangent ? ModeOverride::kForceTangent : ModeOverride::kNone);
          Image out;
          {
            py::gil_scoped_release release;
            out = unwarp(img, rm);
          }
          return from_image(out);
        },
        py::arg("frame"), py::arg("bfov"), py::arg("force_tangent") = false, py::arg("max_side") = 1024);

  m.def("mask_to_bbox", [](const py::array_t<bool, py::array::c_style | py::array::forcecast>& mask,
                           bool rotated) { return mask_to_bbox(to_mask(mask), rotated); },
        py::arg("mask"), py::arg("rotated") = false);
  m.def("mask_to_bfov", [](const py::array_t<bool, py::array::c_style | py::array::forcecast>& mask,
                           bool rotated) { return mask_to_bfov(to_mask(mask), rotated); },
        py::arg("mask"), py::arg("rotated") = false);

  m.def("iou_bbox", &iou_bbox);
  m.def("success_dual", [](const Bbox& gt, const Bbox& tr, int width) {
    return success_dual(gt, tr, ErpDims(width, width / 2));
  }, py::arg("gt"), py::arg("tr"), py::arg("width"));
  m.def("precision_dual", [](const Bbox& gt, const Bbox& tr, int width) {
    return precision_dual(gt, tr, ErpDims(width, width / 2));
  }, py::arg("gt"), py::arg("tr"), py::arg("width"));
  m.def("sphere_iou",
        [](const Bfov& a, const Bfov& b, int grid_width) {
          SphereIouOptions opt;
          opt.grid_width = grid_width;
          return sphere_iou(a, b, opt);
        },
        py::arg("a"), py::arg("b"), py::arg("grid_width") = 1024);

  m.def("evaluate",
        [](const fs::path& gt_dir, const fs::path& results, const std::string& repr, int jobs) {
          const Repr r = repr_or_throw(repr);
          const SequenceLayout seq(gt_dir);
          const auto gt = seq.load_annotations();
          const auto tr = load_results(results, r);
          if (tr.size() != gt.size()) throw ValidationError("results and sequence differ in frame count");
          std::vector<FramePair> pairs(gt.size());
          for (std::size_t i = 0; i < gt.size(); ++i) pairs[i] = {gt[i], tr[i]};
          EvalOptions opt;
          opt.jobs = jobs;
          MetricReport rep;
          {
            py::gil_scoped_release release;
            rep = ope_evaluate(pairs, seq.meta().dims(), r, opt);
          }
          return report_dict(rep);
        },
        py::arg("gt_dir"), py::arg("results"), py::arg("repr") = "bfov", py::arg("jobs") = 1);

  m.def("synthesize",
        [](const std::string& scenario, const fs::path& out, int jobs) {
          const Scenario s = parse_scenario(scenario);
          py::gil_scoped_release release;
          generate(s, out, jobs);
        },
        py::arg("scenario"), py::arg("out"), py::arg("jobs") = 1);

  m.def("attributes",
        [](const fs::path& seq_dir) {
          const SequenceLayout seq(seq_dir);
          const AttributeResult r = compute_attributes(seq.load_annotations(), seq.meta().dims());
          py::dict out;
          for (const auto name : kAttributeNames) out[py::str(std::string(name))] = r.set.get(name);
          return out;
        },
        py::arg("seq_dir"));
}
