#pragma once

// Shared fixtures and independent oracles for the unit and acceptance
// suites. Oracles here must not call into the code paths they check.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "lineguide/lineguide.hpp"

namespace lineguide::testing {

namespace fs = std::filesystem;

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("lineguide_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

/// Foreground on the half-open pixel rectangle [x0, x1) x [y0, y1).
inline ForegroundMask rect_mask(int w, int h, int x0, int y0, int x1, int y1) {
  ForegroundMask m(w, h);
  for (int y = std::max(0, y0); y < std::min(h, y1); ++y) {
    for (int x = std::max(0, x0); x < std::min(w, x1); ++x) m.set(x, y, true);
  }
  return m;
}

inline ForegroundMask translate_mask(const ForegroundMask& m, int dx, int dy) {
  ForegroundMask out(m.width, m.height);
  for (int y = 0; y < m.height; ++y) {
    for (int x = 0; x < m.width; ++x) {
      if (m.at(x, y) && x + dx >= 0 && y + dy >= 0 && x + dx < m.width && y + dy < m.height) {
        out.set(x + dx, y + dy, true);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Assignment oracle: exhaustive permutations, cost summed in row order.

inline double brute_force_min_cost(const CostMatrix& c) {
  std::vector<int> perm(c.cols);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int i = 0; i < c.rows; ++i) total += c.at(i, perm[i]);
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Lexicographically first optimal assignment by exhaustive search (square).
inline std::vector<int> brute_force_lexicographic(const CostMatrix& c) {
  std::vector<int> perm(c.cols);
  std::iota(perm.begin(), perm.end(), 0);
  const double best = brute_force_min_cost(c);
  do {
    double total = 0.0;
    for (int i = 0; i < c.rows; ++i) total += c.at(i, perm[i]);
    if (total == best) return perm;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {};
}

// ---------------------------------------------------------------------------
// Crossing oracle: orientation signs, written independently of the
// parametric test used by crossing_count.

inline int orientation_sign(double ax, double ay, double bx, double by, double cx, double cy) {
  const double v = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
  return (v > 0) - (v < 0);
}

inline bool oracle_proper_intersection(Vec2 p0, Vec2 p1, Vec2 q0, Vec2 q1) {
  const int o1 = orientation_sign(p0.x, p0.y, p1.x, p1.y, q0.x, q0.y);
  const int o2 = orientation_sign(p0.x, p0.y, p1.x, p1.y, q1.x, q1.y);
  const int o3 = orientation_sign(q0.x, q0.y, q1.x, q1.y, p0.x, p0.y);
  const int o4 = orientation_sign(q0.x, q0.y, q1.x, q1.y, p1.x, p1.y);
  return o1 * o2 < 0 && o3 * o4 < 0;
}

inline std::size_t oracle_crossing_count(const std::vector<std::vector<Vec2>>& centers_per_frame) {
  std::size_t n = 0;
  for (std::size_t t = 0; t + 1 < centers_per_frame.size(); ++t) {
    const auto& a = centers_per_frame[t];
    const auto& b = centers_per_frame[t + 1];
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = i + 1; j < a.size(); ++j) n += oracle_proper_intersection(a[i], b[i], a[j], b[j]);
    }
  }
  return n;
}

inline std::size_t oracle_crossing_count(const GuidanceSequence& g) {
  std::vector<std::vector<Vec2>> centers;
  for (const auto& set : g.line_sets) {
    std::vector<Vec2> c;
    for (const auto& l : set.lines) c.push_back({0.5 * (l.x1 + l.x2), 0.5 * (l.y1 + l.y2)});
    centers.push_back(std::move(c));
  }
  return oracle_crossing_count(centers);
}

// ---------------------------------------------------------------------------
// Cubic Bernstein form, the closed form the clamped four-point spline must match.

inline double bernstein_cubic(double p0, double p1, double p2, double p3, double u) {
  const double v = 1.0 - u;
  return v * v * v * p0 + 3.0 * v * v * u * p1 + 3.0 * v * u * u * p2 + u * u * u * p3;
}

// ---------------------------------------------------------------------------
// Crossing-ablation scene on a 400x300 frame. Two short horizontal
// foreground lines sit in a small box in A and in a taller box on the right
// in B, with their horizontal order reversed. One static background line
// lies outside both masks. Raw pixel-space matching swaps the pair and the
// center paths cross within step 2 -> 3 of T = 13; canonical matching keeps
// top with top.
struct CrossingScene {
  LineSet lines_a, lines_b;
  ForegroundMask mask_a, mask_b;
};

inline CrossingScene make_crossing_scene() {
  CrossingScene s;
  const LineSegment background{300, 250, 360, 250};
  s.lines_a = {{{25, 100, 55, 100}, {37, 106, 67, 106}, background}, 400, 300};
  s.lines_b = {{{237, 110, 267, 110}, {225, 130, 255, 130}, background}, 400, 300};
  s.mask_a = rect_mask(400, 300, 20, 95, 73, 112);
  s.mask_b = rect_mask(400, 300, 220, 105, 273, 136);
  return s;
}

}  // namespace lineguide::testing
