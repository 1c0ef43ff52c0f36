#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "lineguide/error.hpp"
#include "lineguide/geometry.hpp"

namespace lineguide {

/// Clamped knot vector on [0, 1] for `count` control points of `degree`:
/// degree+1 zeros, uniform interior knots, degree+1 ones.
inline std::vector<double> clamped_uniform_knots(std::size_t count, int degree) {
  if (degree < 1 || count < static_cast<std::size_t>(degree) + 1) {
    throw Error(Errc::invalid_argument, "need at least degree+1 control points");
  }
  const std::size_t interior = count - degree - 1;
  std::vector<double> knots;
  knots.reserve(count + degree + 1);
  for (int i = 0; i <= degree; ++i) knots.push_back(0.0);
  for (std::size_t i = 1; i <= interior; ++i) knots.push_back(static_cast<double>(i) / (interior + 1));
  for (int i = 0; i <= degree; ++i) knots.push_back(1.0);
  return knots;
}

/// Affine blend, exact at t = 0, t = 1 and for a == b.
inline double blend(double a, double b, double t) { return std::lerp(a, b, t); }
inline Vec2 blend(Vec2 a, Vec2 b, double t) { return {std::lerp(a.x, b.x, t), std::lerp(a.y, b.y, t)}; }

/// de Boor evaluation. `Point` needs a `blend` overload (double, Vec2).
template <typename Point>
Point evaluate_bspline(std::span<const Point> control, std::span<const double> knots, int degree, double u) {
  const std::size_t n = control.size();
  if (knots.size() != n + degree + 1) throw Error(Errc::invalid_argument, "knot vector size mismatch");
  // Span index k with knots[k] <= u < knots[k+1]; u at the right end uses the last span.
  std::size_t k = degree;
  if (u >= knots[n]) {
    k = n - 1;
  } else {
    while (k + 1 < n && knots[k + 1] <= u) ++k;
  }
  std::vector<Point> d(control.begin() + (k - degree), control.begin() + (k + 1));
  for (int r = 1; r <= degree; ++r) {
    for (int j = degree; j >= r; --j) {
      const std::size_t i = k - degree + j;
      const double denom = knots[i + degree + 1 - r] - knots[i];
      const double alpha = denom > 0.0 ? (u - knots[i]) / denom : 0.0;
      d[j] = blend(d[j - 1], d[j], alpha);
    }
  }
  return d[degree];
}

/// Clamped cubic over exactly four control points (equivalent to a Bezier segment).
template <typename Point>
Point evaluate_clamped_cubic(const Point& p0, const Point& p1, const Point& p2, const Point& p3, double u) {
  static const std::vector<double> knots = clamped_uniform_knots(4, 3);
  const Point control[4] = {p0, p1, p2, p3};
  return evaluate_bspline<Point>(std::span<const Point>(control, 4), knots, 3, u);
}

}  // namespace lineguide
