#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "lineguide/error.hpp"
#include "lineguide/flow.hpp"
#include "lineguide/geometry.hpp"
#include "lineguide/trajectory.hpp"

namespace lineguide {

using FlowSequence = std::vector<FlowField>;

struct SimilarityReport {
  std::vector<double> per_frame;
  std::vector<bool> frame_excluded;  // every pixel fell under the magnitude floor
  double overall = 0.0;
  double valid_pixel_fraction = 0.0;
  double raw_sum = 0.0;  // unnormalized sum of cosines over all valid pixels
  std::size_t valid_pixels = 0;
};

// Vectors shorter than this (in pixels) carry no usable direction.
inline constexpr double kFlowMagnitudeFloor = 1e-3;

/// Cosine of the angle between two flow vectors, or nothing if either is
/// below the floor. dot / sqrt(|a|^2 |b|^2) keeps cos(a, a) == 1 exactly.
inline bool flow_cosine(double ax, double ay, double bx, double by, double& out) {
  const double qa = ax * ax + ay * ay;
  const double qb = bx * bx + by * by;
  const double floor2 = kFlowMagnitudeFloor * kFlowMagnitudeFloor;
  if (qa < floor2 || qb < floor2) return false;
  out = std::clamp((ax * bx + ay * by) / std::sqrt(qa * qb), -1.0, 1.0);
  return true;
}

/// Time-aligned comparison: frame i of `ref` against frame i of `gen`.
inline SimilarityReport flow_similarity(const FlowSequence& ref, const FlowSequence& gen) {
  if (ref.size() != gen.size()) {
    throw Error(Errc::length_mismatch, "reference has " + std::to_string(ref.size()) + " flow frames, generated has " +
                                           std::to_string(gen.size()));
  }
  if (ref.empty()) throw Error(Errc::length_mismatch, "flow sequences are empty");
  SimilarityReport rep;
  std::size_t total_pixels = 0;
  for (std::size_t f = 0; f < ref.size(); ++f) {
    const FlowField& r = ref[f];
    const FlowField& g = gen[f];
    if (r.width != g.width || r.height != g.height || r.width != ref.front().width ||
        r.height != ref.front().height) {
      throw Error(Errc::dimension_mismatch, "flow frame " + std::to_string(f) + " dimensions differ");
    }
    double sum = 0.0;
    std::size_t valid = 0;
    for (std::size_t i = 0; i < r.vectors.size(); i += 2) {
      double c = 0.0;
      if (!flow_cosine(r.vectors[i], r.vectors[i + 1], g.vectors[i], g.vectors[i + 1], c)) continue;
      sum += c;
      ++valid;
    }
    total_pixels += r.vectors.size() / 2;
    rep.raw_sum += sum;
    rep.valid_pixels += valid;
    rep.per_frame.push_back(valid ? sum / static_cast<double>(valid) : 0.0);
    rep.frame_excluded.push_back(valid == 0);
  }
  double acc = 0.0;
  for (double v : rep.per_frame) acc += v;
  rep.overall = std::clamp(acc / static_cast<double>(rep.per_frame.size()), -1.0, 1.0);
  rep.valid_pixel_fraction =
      total_pixels ? static_cast<double>(rep.valid_pixels) / static_cast<double>(total_pixels) : 0.0;
  return rep;
}

/// Interiors of p0-p1 and q0-q1 cross at a single point. Touching endpoints
/// and collinear overlap do not count.
inline bool segments_properly_intersect(Vec2 p0, Vec2 p1, Vec2 q0, Vec2 q1) {
  const Vec2 r = p1 - p0, s = q1 - q0;
  const double denom = cross(r, s);
  if (denom == 0.0) return false;
  const Vec2 qp = q0 - p0;
  const double t = cross(qp, s) / denom;
  const double u = cross(qp, r) / denom;
  return t > 0.0 && t < 1.0 && u > 0.0 && u < 1.0;
}

/// Per step (t, t+1), the number of line pairs whose center displacement
/// segments properly intersect, summed over all steps.
inline std::size_t crossing_count(const GuidanceSequence& guidance) {
  std::size_t count = 0;
  for (std::size_t t = 0; t + 1 < guidance.line_sets.size(); ++t) {
    const auto& now = guidance.line_sets[t].lines;
    const auto& next = guidance.line_sets[t + 1].lines;
    const std::size_t k = std::min(now.size(), next.size());
    std::vector<Vec2> c0(k), c1(k);
    for (std::size_t i = 0; i < k; ++i) {
      c0[i] = line_center(now[i]);
      c1[i] = line_center(next[i]);
    }
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        count += segments_properly_intersect(c0[i], c1[i], c0[j], c1[j]);
      }
    }
  }
  return count;
}

}  // namespace lineguide
