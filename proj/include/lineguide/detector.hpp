#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <tuple>
#include <vector>

#include "lineguide/error.hpp"
#include "lineguide/geometry.hpp"
#include "lineguide/image.hpp"

namespace lineguide {

struct DetectorParams {
  double gradient_threshold = 40.0;  // on the [0, 255] magnitude scale
  double min_length = 15.0;          // pixels
  int max_lines = 256;
  double merge_angle_tol = 5.0;  // degrees
  double merge_gap_tol = 3.0;    // pixels

  void validate() const {
    if (!(gradient_threshold > 0) || !(min_length > 0) || max_lines < 1 || !(merge_angle_tol > 0) ||
        !(merge_gap_tol > 0)) {
      throw Error(Errc::invalid_argument, "detector parameters must be positive, max_lines >= 1");
    }
  }
};

/// 3x3 Sobel responses with replicated borders. Magnitude is divided by 4
/// so a full black/white step reads 255.
struct GradientField {
  int width = 0;
  int height = 0;
  std::vector<int> gx;
  std::vector<int> gy;
  std::vector<double> magnitude;

  double mag(int x, int y) const { return magnitude[static_cast<std::size_t>(y) * width + x]; }
};

inline GradientField sobel(const GrayImage& img) {
  GradientField g;
  g.width = img.width;
  g.height = img.height;
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
  g.gx.assign(n, 0);
  g.gy.assign(n, 0);
  g.magnitude.assign(n, 0.0);
  auto px = [&](int x, int y) -> int {
    x = std::clamp(x, 0, img.width - 1);
    y = std::clamp(y, 0, img.height - 1);
    return img.at(x, y);
  };
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const int gx = (px(x + 1, y - 1) + 2 * px(x + 1, y) + px(x + 1, y + 1)) -
                     (px(x - 1, y - 1) + 2 * px(x - 1, y) + px(x - 1, y + 1));
      const int gy = (px(x - 1, y + 1) + 2 * px(x, y + 1) + px(x + 1, y + 1)) -
                     (px(x - 1, y - 1) + 2 * px(x, y - 1) + px(x + 1, y - 1));
      const std::size_t i = static_cast<std::size_t>(y) * img.width + x;
      g.gx[i] = gx;
      g.gy[i] = gy;
      g.magnitude[i] = std::sqrt(static_cast<double>(gx * gx + gy * gy)) / 4.0;
    }
  }
  return g;
}

namespace detail {

inline constexpr int kOrientationBuckets = 16;

// Buckets are centred on multiples of 22.5 degrees, so axis-aligned edges
// sit in the middle of a bucket.
inline int orientation_bucket(int gx, int gy) {
  const double step = 2.0 * std::numbers::pi / kOrientationBuckets;
  const long b = std::lround(std::atan2(static_cast<double>(gy), static_cast<double>(gx)) / step);
  return static_cast<int>(((b % kOrientationBuckets) + kOrientationBuckets) % kOrientationBuckets);
}

struct PixelRun {
  std::vector<std::pair<int, int>> pixels;
  Vec2 centroid;
  Vec2 direction{1.0, 0.0};
  double t_min = 0.0;
  double t_max = 0.0;
  bool alive = true;

  double length() const { return t_max - t_min; }
  Vec2 start() const { return centroid + t_min * direction; }
  Vec2 end() const { return centroid + t_max * direction; }

  // Total least squares over pixel centres.
  void fit() {
    const double n = static_cast<double>(pixels.size());
    double sx = 0, sy = 0;
    for (auto [x, y] : pixels) {
      sx += x + 0.5;
      sy += y + 0.5;
    }
    centroid = {sx / n, sy / n};
    double cxx = 0, cxy = 0, cyy = 0;
    for (auto [x, y] : pixels) {
      const double dx = x + 0.5 - centroid.x, dy = y + 0.5 - centroid.y;
      cxx += dx * dx;
      cxy += dx * dy;
      cyy += dy * dy;
    }
    const double theta = 0.5 * std::atan2(2.0 * cxy, cxx - cyy);
    direction = {std::cos(theta), std::sin(theta)};
    t_min = t_max = 0.0;
    bool first = true;
    for (auto [x, y] : pixels) {
      const double t = dot(Vec2{x + 0.5, y + 0.5} - centroid, direction);
      if (first || t < t_min) t_min = t;
      if (first || t > t_max) t_max = t;
      first = false;
    }
  }
};

inline double lateral_distance(const PixelRun& base, Vec2 p) {
  return std::fabs(cross(base.direction, p - base.centroid));
}

inline bool runs_collinear(const PixelRun& a, const PixelRun& b, double angle_tol_rad, double gap_tol) {
  const LineSegment la{a.start().x, a.start().y, a.end().x, a.end().y};
  const LineSegment lb{b.start().x, b.start().y, b.end().x, b.end().y};
  if (undirected_angle_between(la, lb) > angle_tol_rad) return false;
  const double lateral = std::max({lateral_distance(a, b.start()), lateral_distance(a, b.end()),
                                   lateral_distance(b, a.start()), lateral_distance(b, a.end())});
  if (lateral > gap_tol) return false;
  const double b0 = dot(b.start() - a.centroid, a.direction);
  const double b1 = dot(b.end() - a.centroid, a.direction);
  const double lo = std::min(b0, b1), hi = std::max(b0, b1);
  const double gap = std::max({0.0, lo - a.t_max, a.t_min - hi});
  return gap <= gap_tol;
}

}  // namespace detail

/// Deterministic fallback detector: Sobel gradients, orientation-bucketed
/// connected runs, a least-squares fit per run, then collinear merging.
inline LineSet detect_lines(const Frame& frame, const DetectorParams& params = {}) {
  params.validate();
  LineSet out;
  out.frame_width = frame.width;
  out.frame_height = frame.height;
  if (frame.empty()) return out;

  const GrayImage gray = to_gray(frame);
  const GradientField grad = sobel(gray);
  const int w = frame.width, h = frame.height;
  const std::size_t n = static_cast<std::size_t>(w) * h;

  std::vector<int> bucket(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (grad.magnitude[i] >= params.gradient_threshold) {
      bucket[i] = detail::orientation_bucket(grad.gx[i], grad.gy[i]);
    }
  }

  std::vector<detail::PixelRun> runs;
  std::vector<char> visited(n, 0);
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t seed = static_cast<std::size_t>(y) * w + x;
      if (bucket[seed] < 0 || visited[seed]) continue;
      detail::PixelRun run;
      const int b = bucket[seed];
      visited[seed] = 1;
      stack.assign(1, {x, y});
      while (!stack.empty()) {
        const auto [cx, cy] = stack.back();
        stack.pop_back();
        run.pixels.emplace_back(cx, cy);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx, ny = cy + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
            if (visited[j] || bucket[j] != b) continue;
            visited[j] = 1;
            stack.emplace_back(nx, ny);
          }
        }
      }
      if (run.pixels.size() < 2) continue;
      std::sort(run.pixels.begin(), run.pixels.end(),
                [](auto a, auto c) { return std::tie(a.second, a.first) < std::tie(c.second, c.first); });
      run.fit();
      runs.push_back(std::move(run));
    }
  }

  auto by_length = [](const detail::PixelRun& a, const detail::PixelRun& b) {
    if (a.length() != b.length()) return a.length() > b.length();
    return a.pixels.front() < b.pixels.front();
  };
  std::stable_sort(runs.begin(), runs.end(), by_length);

  const double angle_tol = params.merge_angle_tol * std::numbers::pi / 180.0;
  for (bool merged = true; merged;) {
    merged = false;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      if (!runs[i].alive) continue;
      for (std::size_t j = i + 1; j < runs.size(); ++j) {
        if (!runs[j].alive || !detail::runs_collinear(runs[i], runs[j], angle_tol, params.merge_gap_tol)) {
          continue;
        }
        auto& px = runs[i].pixels;
        px.insert(px.end(), runs[j].pixels.begin(), runs[j].pixels.end());
        std::sort(px.begin(), px.end(),
                  [](auto a, auto c) { return std::tie(a.second, a.first) < std::tie(c.second, c.first); });
        runs[i].fit();
        runs[j].alive = false;
        runs[j].pixels.clear();
        merged = true;
        j = i;  // geometry of i changed; rescan its candidates
      }
    }
  }

  std::vector<LineSegment> lines;
  for (const auto& r : runs) {
    if (!r.alive || r.length() < params.min_length) continue;
    const Vec2 a = r.start(), b = r.end();
    lines.push_back(clamp_to_frame({a.x, a.y, b.x, b.y}, w, h));
  }
  std::stable_sort(lines.begin(), lines.end(), [](const LineSegment& a, const LineSegment& b) {
    const double la = line_length(a), lb = line_length(b);
    if (la != lb) return la > lb;
    return std::tie(a.y1, a.x1, a.y2, a.x2) < std::tie(b.y1, b.x1, b.y2, b.x2);
  });
  if (lines.size() > static_cast<std::size_t>(params.max_lines)) lines.resize(params.max_lines);
  out.lines = std::move(lines);
  return out;
}

}  // namespace lineguide
