// omnitrack command-line interface.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "omnitrack/adapter.hpp"
#include "omnitrack/dataset_io.hpp"
#include "omnitrack/errors.hpp"
#include "omnitrack/harness.hpp"
#include "omnitrack/image.hpp"
#include "omnitrack/mask_convert.hpp"
#include "omnitrack/metrics.hpp"
#include "omnitrack/oracle.hpp"
#include "omnitrack/parallel.hpp"
#include "omnitrack/region.hpp"
#include "omnitrack/report.hpp"
#include "omnitrack/synth.hpp"

namespace fs = std::filesystem;
using namespace omni;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitRuntime = 3;

Bfov parse_bfov_arg(const std::string& s) {
  const auto f = parse_bfov(s);
  if (!f) throw ValidationError("--bfov needs clon,clat,theta,phi[,gamma] in degrees");
  return *f;
}

int cmd_unwarp(const std::string& input, const std::string& bfov, const std::string& mode,
               const std::string& out, double ppd, int max_side, int jobs) {
  const Bfov f = parse_bfov_arg(bfov);
  const Image frame = read_png(input);
  ResolutionPolicy pol;
  pol.pixels_per_degree = ppd;
  pol.max_side = max_side;
  const RegionMap rm = build_region(f, ErpDims(frame.width(), frame.height()), pol,
                                    mode == "tangent" ? ModeOverride::kForceTangent : ModeOverride::kNone);
  write_png(out, unwarp(frame, rm, jobs));
  std::cout << "wrote " << out << " (" << rm.width() << "x" << rm.height() << ", "
            << (rm.mode() == RegionMode::kTangent ? "tangent" : "sphere") << ")\n";
  return 0;
}

int cmd_mask2anno(const std::string& masks, const std::string& rotated, const std::string& out,
                  int jobs) {
  std::vector<fs::path> files;
  if (!fs::is_directory(masks)) throw IoError("not a directory: " + masks);
  for (const auto& e : fs::directory_iterator(masks)) {
    if (e.is_regular_file() && e.path().extension() == ".png") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ValidationError("no .png masks in " + masks);
  const bool with_rotation = rotated == "on";
  const std::size_t n = files.size();
  std::vector<std::optional<Bbox>> bbox(n), rbbox(n);
  std::vector<std::optional<Bfov>> bfov(n), rbfov(n);
  std::vector<std::string> errors(n);
  parallel_for(n, jobs, [&](std::size_t i) {
    try {
      const Mask m = read_mask(files[i]);
      bbox[i] = mask_to_bbox(m, false);
      bfov[i] = mask_to_bfov(m, false);
      if (with_rotation) {
        rbbox[i] = mask_to_bbox(m, true);
        rbfov[i] = mask_to_bfov(m, true);
      }
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });
  int bad = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i].empty()) continue;
    std::cerr << "error: " << errors[i] << '\n';
    ++bad;
  }
  fs::create_directories(out);
  write_bbox_file(fs::path(out) / "bbox.txt", bbox);
  write_bfov_file(fs::path(out) / "bfov.txt", bfov);
  if (with_rotation) {
    write_bbox_file(fs::path(out) / "rbbox.txt", rbbox);
    write_bfov_file(fs::path(out) / "rbfov.txt", rbfov);
  }
  std::cout << "converted " << (n - bad) << " of " << n << " masks\n";
  return bad ? kExitInput : 0;
}

int cmd_eval(const std::string& gt_dir, const std::string& results, const std::string& repr_s,
             const std::string& out, int grid, int jobs) {
  const auto repr = parse_repr(repr_s);
  if (!repr) throw ValidationError("--repr must be bbox, rbbox, bfov or rbfov");
  const SequenceLayout seq(gt_dir);
  const SequenceMeta meta = seq.meta();
  const auto gt = seq.load_annotations();
  const auto tr = load_results(results, *repr);
  if (tr.empty()) throw ValidationError(results + " holds no result lines");
  if (tr.size() != gt.size()) {
    throw ValidationError(results + " has " + std::to_string(tr.size()) + " lines but the sequence has " +
                          std::to_string(gt.size()) + " frames");
  }
  std::vector<FramePair> pairs(gt.size());
  for (std::size_t i = 0; i < gt.size(); ++i) pairs[i] = {gt[i], tr[i]};
  EvalOptions opt;
  opt.jobs = jobs;
  opt.sphere.grid_width = grid;
  const MetricReport rep = ope_evaluate(pairs, meta.dims(), *repr, opt);
  auto j = report_to_json(rep);
  j["sequence"] = meta.name;
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw IoError("cannot write " + out);
    f << j.dump(2) << '\n';
  }
  std::cout << meta.name << ": " << headline(rep) << '\n';
  return 0;
}

int cmd_run(const std::string& seq_dir, const std::string& adapter_cmd, const std::string& mode,
            const std::string& out, double k, int timeout_ms, int max_side, int jobs) {
  const SequenceLayout seq(seq_dir);
  const SequenceMeta meta = seq.meta();
  const auto gt = seq.load_annotations();
  if (gt.empty()) throw ValidationError("sequence has no frames");
  HarnessConfig cfg;
  cfg.context_scale = k;
  cfg.mode = mode == "force-tangent" ? ModeOverride::kForceTangent : ModeOverride::kNone;
  cfg.resolution.max_side = max_side;
  cfg.jobs = jobs;
  fs::create_directories(out);
  cfg.sidecar = fs::absolute(fs::path(out) / "sidecar.json");
  cfg.validate();

  FrameSource frames{meta.dims(), meta.frames, [&](int t) { return read_png(seq.frame_path(t)); }};
  ProcessAdapter adapter(adapter_cmd, std::chrono::milliseconds(timeout_ms),
                         {{"OMNITRACK_SIDECAR", cfg.sidecar.string()}});
  const std::string name = adapter.hello();
  const auto steps = run_ope(frames, gt.front(), cfg, adapter);
  adapter.close();
  write_run(out, steps);
  const auto failed = std::count_if(steps.begin(), steps.end(), [](const TrackStep& s) { return s.failed; });
  std::cout << "tracked " << steps.size() << " frames of " << meta.name << " with " << name;
  if (failed) std::cout << " (" << failed << " failed steps)";
  std::cout << '\n';
  return 0;
}

int cmd_synth(const std::string& spec, const std::string& out, int jobs) {
  const Scenario s = parse_scenario(spec);
  generate(s, out, jobs);
  std::cout << "wrote " << s.frames << " frames of '" << s.name << "' to " << out << '\n';
  return 0;
}

int cmd_render(const std::string& seq_dir, const std::string& results, const std::string& repr_s,
               const std::string& out, int jobs) {
  const auto repr = parse_repr(repr_s);
  if (!repr) throw ValidationError("--repr must be bbox, rbbox, bfov or rbfov");
  const SequenceLayout seq(seq_dir);
  const SequenceMeta meta = seq.meta();
  const auto gt = seq.load_annotations();
  std::vector<FrameAnnotation> tr;
  if (!results.empty()) {
    tr = load_results(results, *repr);
    if (tr.size() != gt.size()) throw ValidationError("results and sequence differ in frame count");
  }
  fs::create_directories(out);
  auto draw = [&](Image& img, const FrameAnnotation& a, Rgb color) {
    switch (*repr) {
      case Repr::kBbox: if (a.bbox) draw_bbox(img, *a.bbox, color); break;
      case Repr::kRbbox: if (a.rbbox) draw_bbox(img, *a.rbbox, color); break;
      case Repr::kBfov: if (a.bfov) draw_bfov(img, *a.bfov, color); break;
      case Repr::kRbfov: if (a.rbfov) draw_bfov(img, *a.rbfov, color); break;
    }
  };
  parallel_for(gt.size(), jobs, [&](std::size_t i) {
    const int t = static_cast<int>(i) + 1;
    Image img = read_png(seq.frame_path(t));
    draw(img, gt[i], {40, 230, 60});
    if (!tr.empty()) draw(img, tr[i], {250, 40, 200});
    write_png(fs::path(out) / frame_file_name(t), img, 1);
  });
  std::cout << "rendered " << gt.size() << " frames to " << out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Omnidirectional tracking toolkit"};
  app.require_subcommand(1);
  int jobs = default_jobs();
  app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  std::string input, out, bfov, mode = "extended", masks, rotated = "on", gt, results, repr = "bbox",
                          seq, adapter, scenario, sidecar;
  double ppd = 0.0, k = 2.0, bias = 0.0;
  int max_side = 1024, grid = 1024, timeout_ms = 30000;
  bool quantize = false;

  auto* unwarp_cmd = app.add_subcommand("unwarp", "Extract the local image of a BFoV");
  unwarp_cmd->add_option("--input", input, "ERP frame (PNG)")->required();
  unwarp_cmd->add_option("--bfov", bfov, "clon,clat,theta,phi,gamma in degrees")->required();
  unwarp_cmd->add_option("--mode", mode, "extended or tangent")
      ->check(CLI::IsMember({"extended", "tangent"}));
  unwarp_cmd->add_option("--out", out, "Output PNG")->required();
  unwarp_cmd->add_option("--ppd", ppd, "Pixels per degree (default W/360)");
  unwarp_cmd->add_option("--max-side", max_side, "Largest local side")->check(CLI::Range(9, 16384));

  auto* m2a = app.add_subcommand("mask2anno", "Convert masks to the four annotation files");
  m2a->add_option("--masks", masks, "Directory of mask PNGs")->required();
  m2a->add_option("--rotated", rotated, "Also write rbbox/rbfov (on|off)")
      ->check(CLI::IsMember({"on", "off"}));
  m2a->add_option("--out", out, "Output directory")->required();

  auto* eval_cmd = app.add_subcommand("eval", "Score results against a sequence");
  eval_cmd->add_option("--gt", gt, "Sequence directory")->required();
  eval_cmd->add_option("--results", results, "Results file")->required();
  eval_cmd->add_option("--repr", repr, "bbox, rbbox, bfov or rbfov")
      ->check(CLI::IsMember({"bbox", "rbbox", "bfov", "rbfov"}));
  eval_cmd->add_option("--out", out, "Report (JSON)");
  eval_cmd->add_option("--grid", grid, "Spherical IoU grid width")->check(CLI::Range(16, 65536));

  auto* run_cmd = app.add_subcommand("run", "Track a sequence with an external adapter");
  run_cmd->add_option("--seq", seq, "Sequence directory")->required();
  run_cmd->add_option("--adapter", adapter, "Adapter command line")->required();
  run_cmd->add_option("--mode", mode, "extended or force-tangent")
      ->check(CLI::IsMember({"extended", "force-tangent"}));
  run_cmd->add_option("--out", out, "Results directory")->required();
  run_cmd->add_option("--k", k, "Context scale")->check(CLI::Range(1.0, 100.0));
  run_cmd->add_option("--timeout-ms", timeout_ms, "Per-message adapter timeout")->check(CLI::PositiveNumber);
  run_cmd->add_option("--max-side", max_side, "Largest local side")->check(CLI::Range(9, 16384));

  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic sequence");
  synth_cmd->add_option("--scenario", scenario, "name[:key=value,...]")->required();
  synth_cmd->add_option("--out", out, "Output directory")->required();

  auto* render_cmd = app.add_subcommand("render", "Draw gt and result boundaries on frames");
  render_cmd->add_option("--seq", seq, "Sequence directory")->required();
  render_cmd->add_option("--results", results, "Results file");
  render_cmd->add_option("--repr", repr, "bbox, rbbox, bfov or rbfov")
      ->check(CLI::IsMember({"bbox", "rbbox", "bfov", "rbfov"}));
  render_cmd->add_option("--out", out, "Output directory")->required();

  auto* oracle_cmd = app.add_subcommand("oracle-adapter", "Adapter answering from a synthetic truth file");
  oracle_cmd->add_option("--seq", seq, "Synthetic sequence directory")->required();
  oracle_cmd->add_option("--bias", bias, "Offset toward local east, degrees");
  oracle_cmd->add_flag("--quantize", quantize, "Snap box edges to whole pixels");
  oracle_cmd->add_option("--sidecar", sidecar, "Search region file (default $OMNITRACK_SIDECAR)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*unwarp_cmd) return cmd_unwarp(input, bfov, mode, out, ppd, max_side, jobs);
    if (*m2a) return cmd_mask2anno(masks, rotated, out, jobs);
    if (*eval_cmd) return cmd_eval(gt, results, repr, out, grid, jobs);
    if (*run_cmd) return cmd_run(seq, adapter, mode, out, k, timeout_ms, max_side, jobs);
    if (*synth_cmd) return cmd_synth(scenario, out, jobs);
    if (*render_cmd) return cmd_render(seq, results, repr, out, jobs);
    if (*oracle_cmd) {
      OracleOptions opt;
      opt.sequence = seq;
      opt.bias_deg = bias;
      opt.quantize = quantize;
      if (sidecar.empty()) {
        const char* env = std::getenv("OMNITRACK_SIDECAR");
        if (!env) {
          std::cerr << "error: no --sidecar and OMNITRACK_SIDECAR is unset\n";
          return kExitInput;
        }
        sidecar = env;
      }
      opt.sidecar = sidecar;
      std::ios::sync_with_stdio(false);
      return serve_oracle(opt, std::cin, std::cout);
    }
  } catch (const AdapterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
