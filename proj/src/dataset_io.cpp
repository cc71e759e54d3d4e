#include "omnitrack/dataset_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "omnitrack/errors.hpp"
#include "omnitrack/image.hpp"

namespace omni {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string_view strip_comment(std::string_view s) {
  const auto h = s.find('#');
  return trim(h == std::string_view::npos ? s : s.substr(0, h));
}

double parse_number(std::string_view tok) {
  tok = trim(tok);
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    throw ValidationError("bad number '" + std::string(tok) + "'");
  }
  return v;
}

// 4 or 5 comma-separated numbers; a missing fifth value is 0.
std::array<double, 5> parse_fields(std::string_view line) {
  std::array<double, 5> out{};
  std::size_t n = 0;
  while (true) {
    const auto comma = line.find(',');
    if (n == 5) throw ValidationError("expected at most 5 values");
    out[n++] = parse_number(line.substr(0, comma));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  if (n < 4) throw ValidationError("expected 4 or 5 comma-separated values");
  return out;
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::string join5(double a, double b, double c, double d, double e) {
  return fixed6(a) + "," + fixed6(b) + "," + fixed6(c) + "," + fixed6(d) + "," + fixed6(e);
}

template <class T, class Parse>
std::vector<std::optional<T>> read_rows(const fs::path& path, Parse parse) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::optional<T>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view body = strip_comment(line);
    if (body.empty()) continue;
    try {
      rows.push_back(parse(body));
    } catch (const ValidationError& e) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return rows;
}

template <class T, class Format>
void write_rows(const fs::path& path, std::span<const std::optional<T>> rows,
                std::string_view header, Format format) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  if (!header.empty()) out << "# " << header << '\n';
  for (const auto& r : rows) out << (r ? format(*r) : std::string("none")) << '\n';
  if (!out) throw IoError("short write to " + path.string());
}

std::vector<std::pair<std::string, std::string>> read_key_values(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view body = strip_comment(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    }
    kv.emplace_back(std::string(trim(body.substr(0, eq))), std::string(trim(body.substr(eq + 1))));
  }
  return kv;
}

int parse_int(const std::string& s, const fs::path& path, const std::string& key) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ValidationError(path.string() + ": " + key + " is not an integer: '" + s + "'");
  }
  return v;
}

}  // namespace

std::string format_bbox(const Bbox& b) { return join5(b.cx, b.cy, b.w, b.h, rad2deg(b.gamma)); }

std::string format_bfov(const Bfov& f) {
  return join5(rad2deg(f.clon), rad2deg(f.clat), rad2deg(f.theta), rad2deg(f.phi),
               rad2deg(f.gamma));
}

std::optional<Bbox> parse_bbox(std::string_view line) {
  line = trim(line);
  if (line == "none") return std::nullopt;
  const auto v = parse_fields(line);
  if (!(v[2] > 0) || !(v[3] > 0)) throw ValidationError("box width and height must be positive");
  return Bbox{v[0], v[1], v[2], v[3], deg2rad(v[4])};
}

std::optional<Bfov> parse_bfov(std::string_view line) {
  line = trim(line);
  if (line == "none") return std::nullopt;
  const auto v = parse_fields(line);
  return validate_bfov({deg2rad(v[0]), deg2rad(v[1]), deg2rad(v[2]), deg2rad(v[3]), deg2rad(v[4])});
}

std::vector<std::optional<Bbox>> read_bbox_file(const fs::path& path) {
  return read_rows<Bbox>(path, parse_bbox);
}

std::vector<std::optional<Bfov>> read_bfov_file(const fs::path& path) {
  return read_rows<Bfov>(path, parse_bfov);
}

void write_bbox_file(const fs::path& path, std::span<const std::optional<Bbox>> rows,
                     std::string_view header) {
  write_rows<Bbox>(path, rows, header, format_bbox);
}

void write_bfov_file(const fs::path& path, std::span<const std::optional<Bfov>> rows,
                     std::string_view header) {
  write_rows<Bfov>(path, rows, header, format_bfov);
}

SequenceMeta read_meta(const fs::path& path) {
  SequenceMeta m;
  for (const auto& [k, v] : read_key_values(path)) {
    if (k == "name") {
      m.name = v;
    } else if (k == "width") {
      m.width = parse_int(v, path, k);
    } else if (k == "height") {
      m.height = parse_int(v, path, k);
    } else if (k == "frames") {
      m.frames = parse_int(v, path, k);
    } else if (k == "fps") {
      try {
        m.fps = parse_number(v);
      } catch (const ValidationError&) {
        throw ValidationError(path.string() + ": fps is not a number: '" + v + "'");
      }
    }
  }
  try {
    (void)m.dims();
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return m;
}

void write_meta(const fs::path& path, const SequenceMeta& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "name=" << m.name << "\nwidth=" << m.width << "\nheight=" << m.height
      << "\nfps=" << m.fps << "\nframes=" << m.frames << '\n';
}

AttributeSet read_attributes(const fs::path& path) {
  AttributeSet a;
  for (const auto& [k, v] : read_key_values(path)) {
    if (!attribute_index(k)) throw ValidationError(path.string() + ": unknown attribute " + k);
    if (v != "0" && v != "1") throw ValidationError(path.string() + ": " + k + " must be 0 or 1");
    a.set(k, v == "1");
  }
  return a;
}

void write_attributes(const fs::path& path, const AttributeSet& a) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (std::size_t i = 0; i < kAttributeNames.size(); ++i) {
    out << kAttributeNames[i] << '=' << (a.flags[i] ? 1 : 0) << '\n';
  }
}

std::string annotation_file_name(Repr r) { return std::string(repr_name(r)) + ".txt"; }

std::string frame_file_name(int frame) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06d.png", frame);
  return buf;
}

fs::path SequenceLayout::frame_path(int frame) const { return dir_ / "frames" / frame_file_name(frame); }
fs::path SequenceLayout::mask_path(int frame) const { return dir_ / "masks" / frame_file_name(frame); }

SequenceMeta SequenceLayout::meta() const { return read_meta(meta_path()); }

std::vector<FrameAnnotation> SequenceLayout::load_annotations() const {
  const SequenceMeta m = meta();
  std::vector<FrameAnnotation> out(static_cast<std::size_t>(m.frames));
  for (int i = 0; i < m.frames; ++i) out[i].frame = i + 1;
  auto check = [&](std::size_t n, const fs::path& p) {
    if (n != static_cast<std::size_t>(m.frames)) {
      throw ValidationError(p.string() + " has " + std::to_string(n) + " rows but the sequence has " +
                            std::to_string(m.frames) + " frames");
    }
  };
  for (Repr r : {Repr::kBbox, Repr::kRbbox}) {
    const fs::path p = annotation_path(r);
    if (!fs::exists(p)) continue;
    const auto rows = read_bbox_file(p);
    check(rows.size(), p);
    for (std::size_t i = 0; i < rows.size(); ++i) (r == Repr::kBbox ? out[i].bbox : out[i].rbbox) = rows[i];
  }
  for (Repr r : {Repr::kBfov, Repr::kRbfov}) {
    const fs::path p = annotation_path(r);
    if (!fs::exists(p)) continue;
    const auto rows = read_bfov_file(p);
    check(rows.size(), p);
    for (std::size_t i = 0; i < rows.size(); ++i) (r == Repr::kBfov ? out[i].bfov : out[i].rbfov) = rows[i];
  }
  return out;
}

std::vector<FrameAnnotation> load_results(const fs::path& path, Repr repr) {
  std::vector<FrameAnnotation> out;
  if (is_box_repr(repr)) {
    const auto rows = read_bbox_file(path);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      FrameAnnotation a;
      a.frame = static_cast<int>(i) + 1;
      (repr == Repr::kBbox ? a.bbox : a.rbbox) = rows[i];
      out.push_back(std::move(a));
    }
  } else {
    const auto rows = read_bfov_file(path);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      FrameAnnotation a;
      a.frame = static_cast<int>(i) + 1;
      (repr == Repr::kBfov ? a.bfov : a.rbfov) = rows[i];
      out.push_back(std::move(a));
    }
  }
  return out;
}

Mask read_mask(const fs::path& path) {
  const Image img = read_png(path);
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(img.width()) * img.height());
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) {
      bool on = false;
      for (int ch = 0; ch < img.channels(); ++ch) on = on || img.at(r, c, ch) != 0;
      bits[static_cast<std::size_t>(r) * img.width() + c] = on ? 1 : 0;
    }
  }
  try {
    return Mask(ErpDims(img.width(), img.height()), std::move(bits));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void write_mask(const fs::path& path, const Mask& m) {
  Image img(m.width(), m.height(), 1);
  for (std::size_t i = 0; i < m.bits().size(); ++i) img.data()[i] = m.bits()[i] ? 255 : 0;
  write_png(path, img, 6);
}

}  // namespace omni
