#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "lineguide/error.hpp"
#include "lineguide/geometry.hpp"
#include "lineguide/hungarian.hpp"
#include "lineguide/image.hpp"

namespace lineguide {

struct MatchConfig {
  int sample_count = 32;
  double fg_fraction = 0.0;  // keep a line iff its in-mask sample fraction exceeds this
  std::optional<double> cost_cap;
  double w_center = 1.0;
  double w_angle = 0.0;
  double w_length = 0.0;

  void validate() const {
    if (sample_count < 2) throw Error(Errc::invalid_argument, "sample_count must be >= 2");
    if (!(fg_fraction >= 0.0 && fg_fraction < 1.0)) {
      throw Error(Errc::invalid_argument, "fg_fraction must lie in [0, 1)");
    }
    if (w_center < 0 || w_angle < 0 || w_length < 0 || !(w_center + w_angle + w_length > 0)) {
      throw Error(Errc::invalid_argument, "cost weights must be >= 0 with a positive sum");
    }
    if (cost_cap && !(*cost_cap >= 0.0)) throw Error(Errc::invalid_argument, "cost_cap must be >= 0");
  }
};

struct Correspondence {
  int index_a = 0;  // index into the original L_A
  int index_b = 0;  // index into the original L_B
  bool flip_b = false;
  double cost = 0.0;

  friend bool operator==(const Correspondence&, const Correspondence&) = default;
};

struct CorrespondenceSet {
  std::vector<Correspondence> pairs;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
};

struct ForegroundSelection {
  LineSet subset;
  std::vector<int> index_map;  // subset position -> original index
};

namespace detail {
inline void require_nonempty_mask(const ForegroundMask& mask) {
  for (auto b : mask.bits) {
    if (b) return;
  }
  throw Error(Errc::empty_mask, "foreground mask has no foreground pixels");
}

inline bool sample_in_mask(const ForegroundMask& mask, Vec2 p) {
  const int x = std::clamp(static_cast<int>(std::floor(p.x)), 0, mask.width - 1);
  const int y = std::clamp(static_cast<int>(std::floor(p.y)), 0, mask.height - 1);
  return mask.at(x, y);
}
}  // namespace detail

/// Fraction of `samples` evenly spaced points (endpoints included) that fall
/// on foreground pixels.
inline double foreground_fraction(const LineSegment& l, const ForegroundMask& mask, int samples) {
  int inside = 0;
  for (int k = 0; k < samples; ++k) {
    const double s = static_cast<double>(k) / (samples - 1);
    inside += detail::sample_in_mask(mask, l.p1() + s * (l.p2() - l.p1()));
  }
  return static_cast<double>(inside) / samples;
}

inline ForegroundSelection select_foreground(const LineSet& lines, const ForegroundMask& mask,
                                             const MatchConfig& cfg = {}) {
  cfg.validate();
  detail::require_nonempty_mask(mask);
  if (lines.frame_width != mask.width || lines.frame_height != mask.height) {
    throw Error(Errc::dimension_mismatch, "mask is " + std::to_string(mask.width) + "x" +
                                              std::to_string(mask.height) + ", lines are " +
                                              std::to_string(lines.frame_width) + "x" +
                                              std::to_string(lines.frame_height));
  }
  ForegroundSelection sel;
  sel.subset.frame_width = lines.frame_width;
  sel.subset.frame_height = lines.frame_height;
  for (std::size_t i = 0; i < lines.lines.size(); ++i) {
    if (foreground_fraction(lines.lines[i], mask, cfg.sample_count) > cfg.fg_fraction) {
      sel.subset.lines.push_back(lines.lines[i]);
      sel.index_map.push_back(static_cast<int>(i));
    }
  }
  return sel;
}

/// Tight box over foreground pixels; pixel (x, y) covers [x, x+1) x [y, y+1).
inline BoundingBox tight_bbox(const ForegroundMask& mask) {
  int x0 = mask.width, y0 = mask.height, x1 = -1, y1 = -1;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (!mask.at(x, y)) continue;
      x0 = std::min(x0, x);
      y0 = std::min(y0, y);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
    }
  }
  if (x1 < 0) throw Error(Errc::empty_mask, "cannot bound an empty foreground mask");
  return BoundingBox::from_corners(x0, y0, x1 + 1.0, y1 + 1.0).clamped();
}

/// Pairwise matching cost. Works on canonical lines and, for the unfiltered
/// ablation, on raw pixel-space segments.
template <typename Line>
CostMatrix build_cost_matrix(const std::vector<Line>& a, const std::vector<Line>& b, const MatchConfig& cfg = {}) {
  cfg.validate();
  CostMatrix c(static_cast<int>(a.size()), static_cast<int>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      double v = 0.0;
      if (cfg.w_center > 0) v += cfg.w_center * squared_norm(line_center(a[i]) - line_center(b[j]));
      if (cfg.w_angle > 0) {
        const double d = undirected_angle_between(a[i], b[j]);
        v += cfg.w_angle * d * d;
      }
      if (cfg.w_length > 0) {
        const double d = line_length(a[i]) - line_length(b[j]);
        v += cfg.w_length * d * d;
      }
      c.at(static_cast<int>(i), static_cast<int>(j)) = v;
    }
  }
  return c;
}

/// True iff reversing b strictly shortens the summed endpoint travel from a.
template <typename Line>
bool should_flip(const Line& a, const Line& b) {
  const double keep = squared_norm(a.p1() - b.p1()) + squared_norm(a.p2() - b.p2());
  const double swap = squared_norm(a.p1() - b.p2()) + squared_norm(a.p2() - b.p1());
  return swap < keep;
}

/// Turns a solver assignment over (a, b) into correspondences. Assignment
/// indices refer to a/b; `map_a`/`map_b` translate them to original ids.
template <typename Line>
CorrespondenceSet orient_pairs(const std::vector<Line>& a, const std::vector<Line>& b, const Assignment& assignment,
                               const CostMatrix* cost = nullptr, const std::vector<int>* map_a = nullptr,
                               const std::vector<int>* map_b = nullptr) {
  CorrespondenceSet out;
  out.pairs.reserve(assignment.size());
  for (auto [i, j] : assignment) {
    Correspondence c;
    c.index_a = map_a ? (*map_a)[i] : i;
    c.index_b = map_b ? (*map_b)[j] : j;
    c.flip_b = should_flip(a[i], b[j]);
    c.cost = cost ? cost->at(i, j) : 0.0;
    out.pairs.push_back(c);
  }
  return out;
}

inline CorrespondenceSet apply_cost_cap(CorrespondenceSet set, const MatchConfig& cfg) {
  if (!cfg.cost_cap) return set;
  std::erase_if(set.pairs, [&](const Correspondence& c) { return c.cost > *cfg.cost_cap; });
  return set;
}

/// Everything the layer-aware matcher produced, kept for guidance and dumps.
struct LayerMatch {
  CorrespondenceSet correspondences;
  BoundingBox box_a;
  BoundingBox box_b;
  ForegroundSelection fg_a;
  ForegroundSelection fg_b;
  CostMatrix cost;
  Assignment assignment;
};

inline std::vector<CanonicalLine> normalize_all(const LineSet& set, const BoundingBox& box) {
  std::vector<CanonicalLine> out;
  out.reserve(set.size());
  for (const auto& l : set.lines) out.push_back(normalize_line(l, box));
  return out;
}

/// Foreground selection, canonical normalization in each tight box, then
/// Hungarian assignment on canonical center distance.
inline LayerMatch match_layer_aware(const LineSet& lines_a, const ForegroundMask& mask_a, const LineSet& lines_b,
                                    const ForegroundMask& mask_b, const MatchConfig& cfg = {}) {
  LayerMatch m;
  m.fg_a = select_foreground(lines_a, mask_a, cfg);
  m.fg_b = select_foreground(lines_b, mask_b, cfg);
  m.box_a = tight_bbox(mask_a);
  m.box_b = tight_bbox(mask_b);
  const auto ca = normalize_all(m.fg_a.subset, m.box_a);
  const auto cb = normalize_all(m.fg_b.subset, m.box_b);
  m.cost = build_cost_matrix(ca, cb, cfg);
  m.assignment = hungarian(m.cost);
  m.correspondences =
      apply_cost_cap(orient_pairs(ca, cb, m.assignment, &m.cost, &m.fg_a.index_map, &m.fg_b.index_map), cfg);
  return m;
}

/// Unfiltered matching in raw pixel space (the all-lines linear ablation).
inline LayerMatch match_all_raw(const LineSet& lines_a, const LineSet& lines_b, const MatchConfig& cfg = {}) {
  LayerMatch m;
  for (std::size_t i = 0; i < lines_a.size(); ++i) m.fg_a.index_map.push_back(static_cast<int>(i));
  for (std::size_t j = 0; j < lines_b.size(); ++j) m.fg_b.index_map.push_back(static_cast<int>(j));
  m.fg_a.subset = lines_a;
  m.fg_b.subset = lines_b;
  m.box_a = BoundingBox::from_corners(0, 0, lines_a.frame_width, lines_a.frame_height).clamped();
  m.box_b = BoundingBox::from_corners(0, 0, lines_b.frame_width, lines_b.frame_height).clamped();
  m.cost = build_cost_matrix(lines_a.lines, lines_b.lines, cfg);
  m.assignment = hungarian(m.cost);
  m.correspondences = apply_cost_cap(orient_pairs(lines_a.lines, lines_b.lines, m.assignment, &m.cost), cfg);
  return m;
}

}  // namespace lineguide
