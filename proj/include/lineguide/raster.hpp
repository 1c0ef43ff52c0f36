#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "lineguide/error.hpp"
#include "lineguide/geometry.hpp"
#include "lineguide/image.hpp"
#include "lineguide/trajectory.hpp"

namespace lineguide {

struct RasterParams {
  int stroke_width = 2;
  bool antialias = true;
  int out_width = 0;   // 0: use the line set's frame size
  int out_height = 0;

  void validate() const {
    if (stroke_width < 1) throw Error(Errc::invalid_argument, "stroke_width must be >= 1");
    if (out_width < 0 || out_height < 0) throw Error(Errc::invalid_argument, "output size must be >= 0");
  }
};

using EdgeMap = GrayImage;

namespace raster_detail {

inline constexpr int kSubpixelBits = 8;
inline constexpr std::int64_t kOne = 1 << kSubpixelBits;  // 1 px in fixed point

inline std::int64_t isqrt(std::int64_t v) {
  if (v <= 0) return 0;
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

// Liang-Barsky clip of p + s (q - p), s in [0, 1], against [x0, x1] x [y0, y1].
inline bool clip_segment(Vec2& p, Vec2& q, double x0, double y0, double x1, double y1) {
  double s0 = 0.0, s1 = 1.0;
  const Vec2 d = q - p;
  const double pk[4] = {-d.x, d.x, -d.y, d.y};
  const double qk[4] = {p.x - x0, x1 - p.x, p.y - y0, y1 - p.y};
  for (int k = 0; k < 4; ++k) {
    if (pk[k] == 0.0) {
      if (qk[k] < 0.0) return false;
      continue;
    }
    const double r = qk[k] / pk[k];
    if (pk[k] < 0.0) {
      s0 = std::max(s0, r);
    } else {
      s1 = std::min(s1, r);
    }
    if (s0 > s1) return false;
  }
  const Vec2 a = p + s0 * d, b = p + s1 * d;
  p = a;
  q = b;
  return true;
}

// Plots one segment; pixel (i, j) samples the lattice point (i, j). With
// antialiasing, coverage falls off linearly over one pixel across the stroke
// edge and at the butt caps. Returns whether anything was inked.
inline bool draw_segment(EdgeMap& img, Vec2 a, Vec2 b, int stroke_width, bool antialias) {
  const std::int64_t half = stroke_width * kOne / 2;
  const std::int64_t reach = half + 2 * kOne;
  const double margin = static_cast<double>(reach) / kOne + 1.0;
  if (!clip_segment(a, b, -margin, -margin, img.width - 1 + margin, img.height - 1 + margin)) return false;

  const std::int64_t px = std::llround(a.x * kOne), py = std::llround(a.y * kOne);
  const std::int64_t qx = std::llround(b.x * kOne), qy = std::llround(b.y * kOne);
  const std::int64_t dx = qx - px, dy = qy - py;
  const std::int64_t len2 = dx * dx + dy * dy;
  const std::int64_t len = isqrt(len2);

  auto floor_div = [](std::int64_t v, std::int64_t d) { return v >= 0 ? v / d : -((-v + d - 1) / d); };
  const int i_lo = static_cast<int>(std::max<std::int64_t>(0, floor_div(std::min(px, qx) - reach, kOne)));
  const int i_hi = static_cast<int>(std::min<std::int64_t>(img.width - 1, floor_div(std::max(px, qx) + reach, kOne) + 1));
  const int j_lo = static_cast<int>(std::max<std::int64_t>(0, floor_div(std::min(py, qy) - reach, kOne)));
  const int j_hi = static_cast<int>(std::min<std::int64_t>(img.height - 1, floor_div(std::max(py, qy) + reach, kOne) + 1));

  bool inked = false;
  for (int j = j_lo; j <= j_hi; ++j) {
    const std::int64_t sy = static_cast<std::int64_t>(j) * kOne;
    int row_lo = i_lo, row_hi = i_hi;
    if (dy != 0) {
      // Candidate span only; every pixel is still decided by the integer test.
      const double c = static_cast<double>(px) + static_cast<double>(dx) * static_cast<double>(sy - py) / dy;
      const double spread = static_cast<double>(reach + 1) * len / std::abs(dy) + 2.0 * kOne;
      row_lo = std::max(row_lo, static_cast<int>(std::floor((c - spread) / kOne)));
      row_hi = std::min(row_hi, static_cast<int>(std::ceil((c + spread) / kOne)));
    }
    for (int i = row_lo; i <= row_hi; ++i) {
      const std::int64_t rx = static_cast<std::int64_t>(i) * kOne - px, ry = sy - py;
      std::int64_t perp = 0;
      std::int64_t along = kOne;  // AA weight along the segment, in [0, kOne]
      bool inside_caps = true;
      if (len2 == 0) {
        perp = isqrt(rx * rx + ry * ry);
      } else {
        const std::int64_t proj_num = rx * dx + ry * dy;
        const std::int64_t cr = dx * ry - dy * rx;
        perp = (cr < 0 ? -cr : cr) / len;
        inside_caps = proj_num >= 0 && proj_num <= len2;
        const std::int64_t proj = proj_num / len;
        along = std::clamp<std::int64_t>(std::min(proj, len - proj) + kOne / 2, 0, kOne);
      }
      std::uint8_t value = 0;
      if (antialias) {
        const std::int64_t across = std::clamp<std::int64_t>(half + kOne / 2 - perp, 0, kOne);
        const std::int64_t alpha = (across * along) >> kSubpixelBits;
        value = static_cast<std::uint8_t>((alpha * 255 + kOne / 2) >> kSubpixelBits);
      } else if (perp <= half && inside_caps) {
        value = 255;
      }
      if (value == 0) continue;
      inked = true;
      auto& dst = img.at(i, j);
      dst = std::max(dst, value);
    }
  }
  if (!inked) {
    // Short segments between lattice points still mark their nearest pixel.
    const std::int64_t mx = floor_div(px + qx + kOne, 2 * kOne), my = floor_div(py + qy + kOne, 2 * kOne);
    if (mx >= 0 && my >= 0 && mx < img.width && my < img.height) {
      img.at(static_cast<int>(mx), static_cast<int>(my)) = 255;
      inked = true;
    }
  }
  return inked;
}

}  // namespace raster_detail

/// Plots every segment of `lines` into an 8-bit edge map (background 0,
/// stroke 255). Overlaps keep the max. Output depends only on the inputs.
inline EdgeMap rasterize(const LineSet& lines, const RasterParams& params = {}) {
  params.validate();
  const int w = params.out_width > 0 ? params.out_width : lines.frame_width;
  const int h = params.out_height > 0 ? params.out_height : lines.frame_height;
  if (w <= 0 || h <= 0) throw Error(Errc::dimension_missing, "raster size unknown");
  EdgeMap img(w, h);
  const double sx = lines.frame_width > 0 ? static_cast<double>(w) / lines.frame_width : 1.0;
  const double sy = lines.frame_height > 0 ? static_cast<double>(h) / lines.frame_height : 1.0;
  for (const auto& l : lines.lines) {
    raster_detail::draw_segment(img, {l.x1 * sx, l.y1 * sy}, {l.x2 * sx, l.y2 * sy}, params.stroke_width,
                                params.antialias);
  }
  return img;
}

// ---------------------------------------------------------------------------
// Conditioning manifest

/// Contract with the downstream sampler. Paths are relative to the manifest
/// directory; edge maps are single-channel 8-bit PNGs.
struct ConditioningManifest {
  std::string boundary_a;
  std::string boundary_b;
  std::vector<std::string> edges;
  int T = 0;
  std::string mode;
  std::string timing;
  double flow_scale = 1.0;
};

inline nlohmann::ordered_json to_json(const ConditioningManifest& m) {
  nlohmann::ordered_json j;
  j["boundary_a"] = m.boundary_a;
  j["boundary_b"] = m.boundary_b;
  j["edges"] = m.edges;
  j["T"] = m.T;
  j["mode"] = m.mode;
  j["timing"] = m.timing;
  j["flow_scale"] = m.flow_scale;
  return j;
}

inline ConditioningManifest manifest_from_json(const nlohmann::json& j) {
  ConditioningManifest m;
  try {
    m.boundary_a = j.at("boundary_a").get<std::string>();
    m.boundary_b = j.at("boundary_b").get<std::string>();
    m.edges = j.at("edges").get<std::vector<std::string>>();
    m.T = j.at("T").get<int>();
    m.mode = j.at("mode").get<std::string>();
    m.timing = j.at("timing").get<std::string>();
    m.flow_scale = j.at("flow_scale").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::format, std::string("manifest: ") + e.what());
  }
  if (static_cast<int>(m.edges.size()) != m.T) throw Error(Errc::format, "manifest: edges length != T");
  return m;
}

inline ConditioningManifest load_manifest(const std::filesystem::path& path) {
  const auto bytes = detail::read_file_bytes(path);
  try {
    return manifest_from_json(nlohmann::json::parse(bytes.begin(), bytes.end()));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::format, "'" + path.string() + "': " + e.what());
  }
}

inline std::string edge_file_name(int t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "edge_%04d.png", t);
  return buf;
}

inline constexpr const char* kManifestName = "manifest.json";

namespace detail {
inline std::string relative_to(const std::filesystem::path& target, const std::filesystem::path& base) {
  std::error_code ec;
  const auto abs_target = std::filesystem::weakly_canonical(target, ec);
  const auto abs_base = std::filesystem::weakly_canonical(base, ec);
  return abs_target.lexically_relative(abs_base).generic_string();
}
}  // namespace detail

/// Writes E_1..E_T as edge_0001.png.. plus manifest.json into `out_dir`.
/// Re-running with identical inputs rewrites identical bytes.
inline ConditioningManifest emit_sequence(const GuidanceSequence& guidance, const RasterParams& params,
                                          const std::filesystem::path& out_dir,
                                          const std::filesystem::path& boundary_a,
                                          const std::filesystem::path& boundary_b) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    throw Error(Errc::io, "cannot create output directory '" + out_dir.string() + "'");
  }
  for (const auto& p : {boundary_a, boundary_b}) {
    if (!fs::exists(p)) throw Error(Errc::io, "boundary frame '" + p.string() + "' does not exist");
  }
  ConditioningManifest m;
  m.boundary_a = detail::relative_to(boundary_a, out_dir);
  m.boundary_b = detail::relative_to(boundary_b, out_dir);
  m.T = guidance.frames();
  m.mode = std::string(to_string(guidance.mode));
  m.timing = std::string(to_string(guidance.timing));
  m.flow_scale = guidance.flow_scale;
  for (int t = 1; t <= m.T; ++t) {
    const auto name = edge_file_name(t);
    save_gray(out_dir / name, rasterize(guidance.line_sets[t - 1], params));
    m.edges.push_back(name);
  }
  const auto text = to_json(m).dump(2) + "\n";
  detail::write_file_bytes(out_dir / kManifestName, text.data(), text.size());
  return m;
}

}  // namespace lineguide
