#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "lineguide/bspline.hpp"
#include "lineguide/error.hpp"
#include "lineguide/flow.hpp"
#include "lineguide/geometry.hpp"
#include "lineguide/image.hpp"
#include "lineguide/matching.hpp"

namespace lineguide {

enum class GuidanceMode { linear_all, linear_fg, bspline };

/// `endpoint`: u = t/T, so frame T coincides with the target structure.
/// `interior`: u = t/(T+1), every frame strictly between the boundaries.
enum class TimingRule { endpoint, interior };

inline std::string_view to_string(GuidanceMode m) {
  switch (m) {
    case GuidanceMode::linear_all: return "linear_all";
    case GuidanceMode::linear_fg: return "linear_fg";
    case GuidanceMode::bspline: return "bspline";
  }
  return "bspline";
}

inline std::string_view to_string(TimingRule r) { return r == TimingRule::endpoint ? "endpoint" : "interior"; }

inline GuidanceMode parse_mode(std::string_view s) {
  if (s == "linear_all") return GuidanceMode::linear_all;
  if (s == "linear_fg") return GuidanceMode::linear_fg;
  if (s == "bspline") return GuidanceMode::bspline;
  throw Error(Errc::invalid_argument, "unknown mode '" + std::string(s) + "'");
}

inline TimingRule parse_timing(std::string_view s) {
  if (s == "endpoint") return TimingRule::endpoint;
  if (s == "interior") return TimingRule::interior;
  throw Error(Errc::invalid_argument, "unknown timing '" + std::string(s) + "'");
}

inline double timing_u(int t, int T, TimingRule rule) {
  return rule == TimingRule::endpoint ? static_cast<double>(t) / T : static_cast<double>(t) / (T + 1);
}

struct FlowSummary {
  Vec2 fa;
  Vec2 fb;
  int sample_radius = 5;
  double scale = 1.0;

  Vec2 scaled_fa() const { return scale * fa; }
  Vec2 scaled_fb() const { return scale * fb; }
};

/// Mean flow over pixels inside the mask and within Chebyshev distance
/// `radius` (in pixel cells) of a cell crossed by any of `lines`.
/// Returns (0, 0) when that pixel set is empty.
inline Vec2 average_flow_near_lines(const FlowField& flow, const std::vector<LineSegment>& lines,
                                    const ForegroundMask& mask, int radius) {
  if (flow.width != mask.width || flow.height != mask.height) {
    throw Error(Errc::dimension_mismatch, "flow is " + std::to_string(flow.width) + "x" +
                                              std::to_string(flow.height) + ", mask is " +
                                              std::to_string(mask.width) + "x" + std::to_string(mask.height));
  }
  if (radius < 0) throw Error(Errc::invalid_argument, "flow radius must be >= 0");
  const int w = flow.width, h = flow.height;
  std::vector<char> band(static_cast<std::size_t>(w) * h, 0);
  for (const auto& l : lines) {
    const double len = line_length(l);
    const int steps = std::max(1, static_cast<int>(std::ceil(len * 4.0)));
    int last_x = -1, last_y = -1;
    for (int k = 0; k <= steps; ++k) {
      const Vec2 p = l.p1() + (static_cast<double>(k) / steps) * (l.p2() - l.p1());
      const int cx = std::clamp(static_cast<int>(std::floor(p.x)), 0, w - 1);
      const int cy = std::clamp(static_cast<int>(std::floor(p.y)), 0, h - 1);
      if (cx == last_x && cy == last_y) continue;
      last_x = cx;
      last_y = cy;
      for (int y = std::max(0, cy - radius); y <= std::min(h - 1, cy + radius); ++y) {
        for (int x = std::max(0, cx - radius); x <= std::min(w - 1, cx + radius); ++x) {
          band[static_cast<std::size_t>(y) * w + x] = 1;
        }
      }
    }
  }
  double sx = 0.0, sy = 0.0;
  std::size_t count = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!band[static_cast<std::size_t>(y) * w + x] || !mask.at(x, y)) continue;
      sx += flow.dx(x, y);
      sy += flow.dy(x, y);
      ++count;
    }
  }
  if (count == 0) return {0.0, 0.0};
  return {sx / static_cast<double>(count), sy / static_cast<double>(count)};
}

// ---------------------------------------------------------------------------
// Global box trajectory

/// Box at parameter u. Centers run along the clamped cubic through
/// (c_A, c_A + F_A, c_B - F_B, c_B); extents use (e_A, e_A, e_B, e_B), which
/// eases in and out. Flow never touches extents.
inline BoundingBox box_at(const BoundingBox& a, Vec2 fa, const BoundingBox& b, Vec2 fb, double u) {
  const Vec2 center = evaluate_clamped_cubic(a.center(), a.center() + fa, b.center() - fb, b.center(), u);
  const Vec2 ea{a.w, a.h}, eb{b.w, b.h};
  const Vec2 extent = evaluate_clamped_cubic(ea, ea, eb, eb, u);
  return {center.x, center.y, extent.x, extent.y};
}

struct BoxTrajectory {
  std::vector<BoundingBox> boxes;  // boxes[t-1] for t = 1..T
  std::vector<double> u;
};

inline BoxTrajectory spline_boxes(const BoundingBox& box_a, Vec2 fa, const BoundingBox& box_b, Vec2 fb, int T,
                                  TimingRule timing = TimingRule::endpoint) {
  if (T < 1) throw Error(Errc::invalid_t, "T must be >= 1, got " + std::to_string(T));
  detail::require_valid_box(box_a);
  detail::require_valid_box(box_b);
  BoxTrajectory traj;
  traj.boxes.reserve(T);
  traj.u.reserve(T);
  for (int t = 1; t <= T; ++t) {
    const double u = timing_u(t, T, timing);
    traj.u.push_back(u);
    traj.boxes.push_back(box_at(box_a, fa, box_b, fb, u));
  }
  return traj;
}

inline BoxTrajectory linear_boxes(const BoundingBox& a, const BoundingBox& b, int T, TimingRule timing) {
  if (T < 1) throw Error(Errc::invalid_t, "T must be >= 1, got " + std::to_string(T));
  BoxTrajectory traj;
  for (int t = 1; t <= T; ++t) {
    const double u = timing_u(t, T, timing);
    traj.u.push_back(u);
    traj.boxes.push_back({(1.0 - u) * a.cx + u * b.cx, (1.0 - u) * a.cy + u * b.cy, (1.0 - u) * a.w + u * b.w,
                          (1.0 - u) * a.h + u * b.h});
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Local line interpolation

inline CanonicalLine interpolate_pair(const CanonicalLine& a, const CanonicalLine& b, double u) {
  return {(1.0 - u) * a.u1 + u * b.u1, (1.0 - u) * a.v1 + u * b.v1, (1.0 - u) * a.u2 + u * b.u2,
          (1.0 - u) * a.v2 + u * b.v2};
}

inline LineSegment lerp_segment(const LineSegment& a, const LineSegment& b, double u) {
  return {(1.0 - u) * a.x1 + u * b.x1, (1.0 - u) * a.y1 + u * b.y1, (1.0 - u) * a.x2 + u * b.x2,
          (1.0 - u) * a.y2 + u * b.y2};
}

struct GuidanceSequence {
  std::vector<LineSet> line_sets;  // L_1 .. L_T
  GuidanceMode mode = GuidanceMode::bspline;
  TimingRule timing = TimingRule::endpoint;
  double flow_scale = 1.0;
  BoxTrajectory boxes;

  int frames() const { return static_cast<int>(line_sets.size()); }
};

/// Matched line pairs in original coordinates, B side already flipped.
inline std::vector<std::pair<LineSegment, LineSegment>> resolve_pairs(const CorrespondenceSet& pairs,
                                                                       const LineSet& lines_a,
                                                                       const LineSet& lines_b) {
  std::vector<std::pair<LineSegment, LineSegment>> out;
  out.reserve(pairs.size());
  for (const auto& c : pairs.pairs) {
    if (c.index_a < 0 || c.index_b < 0 || static_cast<std::size_t>(c.index_a) >= lines_a.size() ||
        static_cast<std::size_t>(c.index_b) >= lines_b.size()) {
      throw Error(Errc::invalid_argument, "correspondence index out of range");
    }
    const LineSegment& b = lines_b.lines[c.index_b];
    out.emplace_back(lines_a.lines[c.index_a], c.flip_b ? b.flipped() : b);
  }
  return out;
}

/// Line sets L_1..L_T for one of the three trajectory modes. The caller
/// supplies correspondences appropriate to the mode: raw all-line matching
/// for linear_all, layer-aware matching otherwise.
inline GuidanceSequence build_guidance(const CorrespondenceSet& pairs, const LineSet& lines_a, const LineSet& lines_b,
                                       const BoundingBox& box_a, const BoundingBox& box_b, const FlowSummary& flows,
                                       int T, GuidanceMode mode, TimingRule timing = TimingRule::endpoint) {
  if (T < 1) throw Error(Errc::invalid_t, "T must be >= 1, got " + std::to_string(T));
  GuidanceSequence seq;
  seq.mode = mode;
  seq.timing = timing;
  seq.flow_scale = flows.scale;
  const auto resolved = resolve_pairs(pairs, lines_a, lines_b);
  seq.line_sets.assign(T, LineSet{{}, lines_a.frame_width, lines_a.frame_height});

  if (mode == GuidanceMode::bspline) {
    seq.boxes = spline_boxes(box_a, flows.scaled_fa(), box_b, flows.scaled_fb(), T, timing);
    std::vector<std::pair<CanonicalLine, CanonicalLine>> canonical;
    canonical.reserve(resolved.size());
    for (const auto& [a, b] : resolved) canonical.emplace_back(normalize_line(a, box_a), normalize_line(b, box_b));
    for (int t = 0; t < T; ++t) {
      auto& out = seq.line_sets[t].lines;
      out.reserve(canonical.size());
      for (const auto& [ca, cb] : canonical) {
        out.push_back(denormalize_line(interpolate_pair(ca, cb, seq.boxes.u[t]), seq.boxes.boxes[t]));
      }
    }
  } else {
    seq.boxes = linear_boxes(box_a, box_b, T, timing);
    for (int t = 0; t < T; ++t) {
      auto& out = seq.line_sets[t].lines;
      out.reserve(resolved.size());
      for (const auto& [a, b] : resolved) out.push_back(lerp_segment(a, b, seq.boxes.u[t]));
    }
  }
  return seq;
}

/// Aggregated boundary flows around the matched lines of each side.
inline FlowSummary summarize_flow(const FlowField& flow_a, const FlowField& flow_b, const CorrespondenceSet& pairs,
                                  const LineSet& lines_a, const LineSet& lines_b, const ForegroundMask& mask_a,
                                  const ForegroundMask& mask_b, int radius, double scale) {
  if (radius < 1) throw Error(Errc::invalid_argument, "flow radius must be >= 1");
  std::vector<LineSegment> matched_a, matched_b;
  for (const auto& c : pairs.pairs) {
    matched_a.push_back(lines_a.lines.at(c.index_a));
    matched_b.push_back(lines_b.lines.at(c.index_b));
  }
  FlowSummary s;
  s.sample_radius = radius;
  s.scale = scale;
  s.fa = average_flow_near_lines(flow_a, matched_a, mask_a, radius);
  s.fb = average_flow_near_lines(flow_b, matched_b, mask_b, radius);
  return s;
}

}  // namespace lineguide
