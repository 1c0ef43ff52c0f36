#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "lineguide/error.hpp"

namespace lineguide {

// Image coordinates: origin top-left, x to the right, y downward. All
// coordinates stay continuous until rasterization.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
constexpr double squared_norm(Vec2 a) { return dot(a, a); }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

struct LineSegment {
  double x1 = 0.0, y1 = 0.0, x2 = 0.0, y2 = 0.0;

  constexpr Vec2 p1() const { return {x1, y1}; }
  constexpr Vec2 p2() const { return {x2, y2}; }
  constexpr LineSegment flipped() const { return {x2, y2, x1, y1}; }
  bool finite() const {
    return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) && std::isfinite(y2);
  }
  friend constexpr bool operator==(const LineSegment&, const LineSegment&) = default;
};

struct LineSet {
  std::vector<LineSegment> lines;
  int frame_width = 0;
  int frame_height = 0;

  std::size_t size() const { return lines.size(); }
  bool empty() const { return lines.empty(); }
};

/// Endpoints in the unit square of a bounding box. Lines may overhang the
/// box slightly, so coordinates are not clamped.
struct CanonicalLine {
  double u1 = 0.0, v1 = 0.0, u2 = 0.0, v2 = 0.0;

  constexpr Vec2 p1() const { return {u1, v1}; }
  constexpr Vec2 p2() const { return {u2, v2}; }
  constexpr CanonicalLine flipped() const { return {u2, v2, u1, v1}; }
  friend constexpr bool operator==(const CanonicalLine&, const CanonicalLine&) = default;
};

// Extents below this are raised around the same center.
inline constexpr double kMinBoxExtent = 2.0;

/// Axis-aligned box stored as center plus extent.
struct BoundingBox {
  double cx = 0.0, cy = 0.0, w = 0.0, h = 0.0;

  constexpr Vec2 center() const { return {cx, cy}; }
  constexpr Vec2 origin() const { return {cx - w / 2.0, cy - h / 2.0}; }

  BoundingBox clamped() const {
    return {cx, cy, std::max(w, kMinBoxExtent), std::max(h, kMinBoxExtent)};
  }

  static BoundingBox from_corners(double x0, double y0, double x1, double y1) {
    return {(x0 + x1) / 2.0, (y0 + y1) / 2.0, x1 - x0, y1 - y0};
  }

  friend constexpr bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

namespace detail {
inline void require_valid_box(const BoundingBox& b) {
  if (!(std::isfinite(b.cx) && std::isfinite(b.cy) && std::isfinite(b.w) && std::isfinite(b.h)) ||
      !(b.w > 1e-9) || !(b.h > 1e-9)) {
    throw Error(Errc::degenerate_box, "bounding box extent is zero, negative or non-finite");
  }
}
}  // namespace detail

constexpr Vec2 line_center(const LineSegment& l) { return {(l.x1 + l.x2) / 2.0, (l.y1 + l.y2) / 2.0}; }
constexpr Vec2 line_center(const CanonicalLine& l) { return {(l.u1 + l.u2) / 2.0, (l.v1 + l.v2) / 2.0}; }

inline double line_length(const LineSegment& l) { return norm(l.p2() - l.p1()); }
inline double line_length(const CanonicalLine& l) { return norm(l.p2() - l.p1()); }

/// Undirected orientation in [0, pi).
template <typename Line>
double line_angle(const Line& l) {
  const Vec2 d = l.p2() - l.p1();
  double a = std::atan2(d.y, d.x);
  if (a < 0.0) a += std::numbers::pi;
  if (a >= std::numbers::pi) a -= std::numbers::pi;
  return a;
}

/// Angle between two undirected lines, folded to [0, pi/2].
template <typename Line>
double undirected_angle_between(const Line& a, const Line& b) {
  double d = std::fabs(line_angle(a) - line_angle(b));
  if (d > std::numbers::pi / 2.0) d = std::numbers::pi - d;
  return d;
}

inline Vec2 normalize_point(Vec2 p, const BoundingBox& b) {
  detail::require_valid_box(b);
  const Vec2 o = b.origin();
  return {(p.x - o.x) / b.w, (p.y - o.y) / b.h};
}

inline Vec2 denormalize_point(Vec2 q, const BoundingBox& b) {
  detail::require_valid_box(b);
  const Vec2 o = b.origin();
  return {o.x + q.x * b.w, o.y + q.y * b.h};
}

inline CanonicalLine normalize_line(const LineSegment& l, const BoundingBox& b) {
  const Vec2 a = normalize_point(l.p1(), b);
  const Vec2 c = normalize_point(l.p2(), b);
  return {a.x, a.y, c.x, c.y};
}

inline LineSegment denormalize_line(const CanonicalLine& lc, const BoundingBox& b) {
  const Vec2 a = denormalize_point(lc.p1(), b);
  const Vec2 c = denormalize_point(lc.p2(), b);
  return {a.x, a.y, c.x, c.y};
}

inline LineSegment clamp_to_frame(const LineSegment& l, int width, int height) {
  const double w = width, h = height;
  return {std::clamp(l.x1, 0.0, w), std::clamp(l.y1, 0.0, h), std::clamp(l.x2, 0.0, w),
          std::clamp(l.y2, 0.0, h)};
}

}  // namespace lineguide
