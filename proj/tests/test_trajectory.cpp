#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

using namespace lineguide;
using namespace lineguide::testing;

namespace {

BoundingBox random_box(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> c(20.0, 600.0), e(4.0, 300.0);
  return {c(rng), c(rng), e(rng), e(rng)};
}

Vec2 random_flow(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> f(-40.0, 40.0);
  return {f(rng), f(rng)};
}

double angle_between_deg(Vec2 a, Vec2 b) {
  const double c = std::clamp(dot(a, b) / (norm(a) * norm(b)), -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

CorrespondenceSet identity_pairs(std::size_t n) {
  CorrespondenceSet s;
  for (std::size_t i = 0; i < n; ++i) s.pairs.push_back({static_cast<int>(i), static_cast<int>(i), false, 0.0});
  return s;
}

LineSet random_lines(std::mt19937_64& rng, int n, double x0, double y0, double x1, double y1) {
  std::uniform_real_distribution<double> x(x0, x1), y(y0, y1);
  LineSet s{{}, 640, 480};
  for (int i = 0; i < n; ++i) s.lines.push_back({x(rng), y(rng), x(rng), y(rng)});
  return s;
}

}  // namespace

TEST(BSpline, MatchesBernsteinForm) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> d(-100.0, 100.0), u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double p0 = d(rng), p1 = d(rng), p2 = d(rng), p3 = d(rng), t = u(rng);
    EXPECT_NEAR(evaluate_clamped_cubic(p0, p1, p2, p3, t), bernstein_cubic(p0, p1, p2, p3, t), 1e-9);
  }
}

TEST(BSpline, ScalarMidpoint) { EXPECT_DOUBLE_EQ(evaluate_clamped_cubic(0.0, 1.0, 1.0, 0.0, 0.5), 0.75); }

TEST(BSpline, ClampedKnots) {
  EXPECT_EQ(clamped_uniform_knots(4, 3), (std::vector<double>{0, 0, 0, 0, 1, 1, 1, 1}));
  EXPECT_EQ(clamped_uniform_knots(5, 3), (std::vector<double>{0, 0, 0, 0, 0.5, 1, 1, 1, 1}));
}

TEST(BSpline, LongerControlPolygonInterpolatesEnds) {
  const std::vector<double> ctrl = {3, -1, 8, 2, 5, 7};
  const auto knots = clamped_uniform_knots(ctrl.size(), 3);
  EXPECT_EQ(evaluate_bspline<double>(ctrl, knots, 3, 0.0), 3.0);
  EXPECT_EQ(evaluate_bspline<double>(ctrl, knots, 3, 1.0), 7.0);
}

TEST(SplineBoxes, StaticWhenNothingMoves) {
  const BoundingBox b{100, 80, 40, 30};
  const BoxTrajectory tr = spline_boxes(b, {}, b, {}, 13);
  ASSERT_EQ(tr.boxes.size(), 13u);
  for (const auto& x : tr.boxes) EXPECT_EQ(x, b);
}

TEST(SplineBoxes, EndpointsAreExact) {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 100; ++i) {
    const BoundingBox a = random_box(rng), b = random_box(rng);
    const Vec2 fa = random_flow(rng), fb = random_flow(rng);
    EXPECT_EQ(box_at(a, fa, b, fb, 0.0), a);
    EXPECT_EQ(box_at(a, fa, b, fb, 1.0), b);
    const BoxTrajectory tr = spline_boxes(a, fa, b, fb, 7);
    EXPECT_EQ(tr.boxes.back(), b);
    for (const auto& x : tr.boxes) {
      EXPECT_GT(x.w, 0.0);
      EXPECT_GT(x.h, 0.0);
    }
  }
}

TEST(SplineBoxes, StartTangentFollowsFlow) {
  std::mt19937_64 rng(43);
  const double delta = 1e-4;
  for (int i = 0; i < 100; ++i) {
    const BoundingBox a = random_box(rng), b = random_box(rng);
    Vec2 fa = random_flow(rng);
    if (norm(fa) < 1.0) fa = {1.5, -0.5};
    const Vec2 step = box_at(a, fa, b, random_flow(rng), delta).center() - a.center();
    EXPECT_LE(angle_between_deg((1.0 / delta) * step, fa), 5.0);
  }
}

TEST(SplineBoxes, ExtentsIgnoreFlow) {
  const BoundingBox a{50, 50, 20, 10}, b{300, 200, 60, 40};
  for (double u : {0.1, 0.37, 0.8}) {
    const BoundingBox with = box_at(a, {30, -20}, b, {-10, 5}, u);
    const BoundingBox without = box_at(a, {}, b, {}, u);
    EXPECT_EQ(with.w, without.w);
    EXPECT_EQ(with.h, without.h);
    EXPECT_NEAR(with.w, bernstein_cubic(20, 20, 60, 60, u), 1e-12);
  }
}

TEST(SplineBoxes, InvalidInputs) {
  const BoundingBox b{10, 10, 4, 4};
  try {
    spline_boxes(b, {}, b, {}, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_t);
  }
  EXPECT_THROW(spline_boxes(b, {}, BoundingBox{10, 10, 0, 4}, {}, 3), Error);
}

TEST(Timing, Rules) {
  EXPECT_EQ(timing_u(13, 13, TimingRule::endpoint), 1.0);
  EXPECT_EQ(timing_u(1, 13, TimingRule::interior), 1.0 / 14.0);
  EXPECT_LT(timing_u(13, 13, TimingRule::interior), 1.0);
  EXPECT_EQ(parse_timing("interior"), TimingRule::interior);
  EXPECT_THROW(parse_mode("cubic"), Error);
}

TEST(InterpolatePair, Examples) {
  const CanonicalLine a{0, 0, 1, 0}, b{0, 1, 1, 1};
  EXPECT_EQ(interpolate_pair(a, b, 0.0), a);
  EXPECT_EQ(interpolate_pair(a, b, 1.0), b);
  EXPECT_EQ(interpolate_pair(a, b, 0.5), (CanonicalLine{0, 0.5, 1, 0.5}));
  const CanonicalLine p{0.2, 0.9, 0.4, -0.3}, q{1.1, 0.1, 0.7, 0.6};
  const CanonicalLine r = interpolate_pair(p, q, 0.25);
  EXPECT_EQ(r.u1, 0.75 * p.u1 + 0.25 * q.u1);
  EXPECT_EQ(r.v2, 0.75 * p.v2 + 0.25 * q.v2);
}

TEST(AverageFlow, UniformField) {
  const FlowField f(40, 30, 2.0f, 0.0f);
  const Vec2 v = average_flow_near_lines(f, {{5, 5, 30, 20}}, ForegroundMask(40, 30, true), 5);
  EXPECT_EQ(v, (Vec2{2.0, 0.0}));
}

TEST(AverageFlow, EmptyLineSetIsZero) {
  const FlowField f(40, 30, 2.0f, 1.0f);
  EXPECT_EQ(average_flow_near_lines(f, {}, ForegroundMask(40, 30, true), 5), (Vec2{0, 0}));
}

TEST(AverageFlow, BandInLeftHalf) {
  FlowField f(60, 40);
  for (int y = 0; y < 40; ++y) {
    for (int x = 0; x < 60; ++x) f.set(x, y, x < 30 ? 1.0f : 3.0f, 0.0f);
  }
  const Vec2 v = average_flow_near_lines(f, {{8, 20, 20, 20}}, ForegroundMask(60, 40, true), 5);
  EXPECT_EQ(v, (Vec2{1.0, 0.0}));
}

TEST(AverageFlow, RestrictedToMaskAndBand) {
  FlowField f(50, 50);
  for (int y = 0; y < 50; ++y) {
    for (int x = 0; x < 50; ++x) f.set(x, y, static_cast<float>(x), static_cast<float>(y));
  }
  const ForegroundMask m = rect_mask(50, 50, 0, 0, 50, 22);
  const int r = 2;
  // Band around the cells of a horizontal line on row 20: rows 18..22, cols 8..32.
  double sx = 0, sy = 0;
  int n = 0;
  for (int y = 20 - r; y <= 20 + r; ++y) {
    for (int x = 10 - r; x <= 30 + r; ++x) {
      if (!m.at(x, y)) continue;
      sx += x;
      sy += y;
      ++n;
    }
  }
  const Vec2 v = average_flow_near_lines(f, {{10.5, 20.5, 30.5, 20.5}}, m, r);
  EXPECT_NEAR(v.x, sx / n, 1e-12);
  EXPECT_NEAR(v.y, sy / n, 1e-12);
}

TEST(AverageFlow, DimensionMismatch) {
  try {
    average_flow_near_lines(FlowField(10, 10), {}, ForegroundMask(10, 9, true), 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::dimension_mismatch);
  }
}

TEST(BuildGuidance, IdenticalClipsAreFixedPoints) {
  std::mt19937_64 rng(44);
  const LineSet a = random_lines(rng, 7, 100, 100, 300, 250);
  const BoundingBox box{200, 175, 220, 170};
  for (auto mode : {GuidanceMode::linear_all, GuidanceMode::linear_fg, GuidanceMode::bspline}) {
    const GuidanceSequence g = build_guidance(identity_pairs(a.size()), a, a, box, box, {}, 13, mode);
    ASSERT_EQ(g.frames(), 13);
    for (const auto& set : g.line_sets) {
      ASSERT_EQ(set.size(), a.size());
      for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_NEAR(set.lines[i].x1, a.lines[i].x1, 1e-6);
        EXPECT_NEAR(set.lines[i].y1, a.lines[i].y1, 1e-6);
        EXPECT_NEAR(set.lines[i].x2, a.lines[i].x2, 1e-6);
        EXPECT_NEAR(set.lines[i].y2, a.lines[i].y2, 1e-6);
      }
    }
  }
}

TEST(BuildGuidance, SplineEqualsLinearUnderCoincidentBoxes) {
  std::mt19937_64 rng(45);
  for (int trial = 0; trial < 50; ++trial) {
    const LineSet a = random_lines(rng, 6, 50, 50, 400, 300);
    const LineSet b = random_lines(rng, 6, 50, 50, 400, 300);
    const BoundingBox box = random_box(rng);
    CorrespondenceSet pairs = identity_pairs(6);
    for (auto& p : pairs.pairs) p.flip_b = (rng() & 1) != 0;
    const auto lin = build_guidance(pairs, a, b, box, box, {}, 13, GuidanceMode::linear_fg);
    const auto spl = build_guidance(pairs, a, b, box, box, {}, 13, GuidanceMode::bspline);
    for (int t = 0; t < 13; ++t) {
      for (std::size_t i = 0; i < 6; ++i) {
        const auto &l = lin.line_sets[t].lines[i], &s = spl.line_sets[t].lines[i];
        EXPECT_NEAR(l.x1, s.x1, 1e-6);
        EXPECT_NEAR(l.y1, s.y1, 1e-6);
        EXPECT_NEAR(l.x2, s.x2, 1e-6);
        EXPECT_NEAR(l.y2, s.y2, 1e-6);
      }
    }
  }
}

TEST(BuildGuidance, SplineConvergesToTargetAtLastFrame) {
  std::mt19937_64 rng(46);
  for (int trial = 0; trial < 50; ++trial) {
    const LineSet a = random_lines(rng, 5, 40, 40, 200, 200);
    const LineSet b = random_lines(rng, 5, 300, 100, 600, 400);
    const BoundingBox ba{120, 120, 170, 170}, bb{450, 250, 310, 310};
    CorrespondenceSet pairs = identity_pairs(5);
    pairs.pairs[2].flip_b = true;
    const FlowSummary flows{random_flow(rng), random_flow(rng), 5, 1.0};
    const auto g = build_guidance(pairs, a, b, ba, bb, flows, 13, GuidanceMode::bspline);
    for (std::size_t i = 0; i < 5; ++i) {
      const LineSegment want = pairs.pairs[i].flip_b ? b.lines[i].flipped() : b.lines[i];
      const LineSegment& got = g.line_sets.back().lines[i];
      EXPECT_NEAR(got.x1, want.x1, 1e-6);
      EXPECT_NEAR(got.y1, want.y1, 1e-6);
      EXPECT_NEAR(got.x2, want.x2, 1e-6);
      EXPECT_NEAR(got.y2, want.y2, 1e-6);
    }
  }
}

TEST(BuildGuidance, EveryFrameHasOneLinePerPair) {
  std::mt19937_64 rng(47);
  const LineSet a = random_lines(rng, 9, 0, 0, 300, 300), b = random_lines(rng, 4, 0, 0, 300, 300);
  CorrespondenceSet pairs;
  for (int i = 0; i < 4; ++i) pairs.pairs.push_back({i * 2, 3 - i, false, 0.0});
  for (auto mode : {GuidanceMode::linear_fg, GuidanceMode::bspline}) {
    const auto g = build_guidance(pairs, a, b, {150, 150, 300, 300}, {150, 150, 100, 100}, {}, 5, mode);
    for (const auto& s : g.line_sets) EXPECT_EQ(s.size(), 4u);
  }
}

TEST(BuildGuidance, RejectsBadInputs) {
  const LineSet a{{{0, 0, 1, 1}}, 10, 10};
  EXPECT_THROW(build_guidance(identity_pairs(1), a, a, {5, 5, 4, 4}, {5, 5, 4, 4}, {}, 0, GuidanceMode::bspline),
               Error);
  CorrespondenceSet bad;
  bad.pairs.push_back({0, 3, false, 0});
  EXPECT_THROW(build_guidance(bad, a, a, {5, 5, 4, 4}, {5, 5, 4, 4}, {}, 3, GuidanceMode::bspline), Error);
}

namespace {

double max_step(const GuidanceSequence& g) {
  double m = 0.0;
  for (std::size_t t = 0; t + 1 < g.line_sets.size(); ++t) {
    for (std::size_t i = 0; i < g.line_sets[t].size(); ++i) {
      const auto &p = g.line_sets[t].lines[i], &q = g.line_sets[t + 1].lines[i];
      m = std::max({m, std::fabs(p.x1 - q.x1), std::fabs(p.y1 - q.y1), std::fabs(p.x2 - q.x2),
                    std::fabs(p.y2 - q.y2)});
    }
  }
  return m;
}

}  // namespace

TEST(BuildGuidance, TemporalSmoothness) {
  std::mt19937_64 rng(48);
  for (int trial = 0; trial < 30; ++trial) {
    const LineSet a = random_lines(rng, 5, 40, 40, 200, 200);
    const LineSet b = random_lines(rng, 5, 250, 150, 600, 450);
    const BoundingBox ba{120, 120, 170, 170}, bb{425, 300, 360, 310};
    const FlowSummary flows{random_flow(rng), random_flow(rng), 5, 1.0};
    const auto g50 = build_guidance(identity_pairs(5), a, b, ba, bb, flows, 50, GuidanceMode::bspline);
    const auto g100 = build_guidance(identity_pairs(5), a, b, ba, bb, flows, 100, GuidanceMode::bspline);
    // Bound from the control polygon: every coordinate moves at most 3x the
    // largest control-point or endpoint span per unit u.
    double span = 0.0;
    for (int i = 0; i < 5; ++i) {
      span = std::max({span, std::fabs(a.lines[i].x1 - b.lines[i].x1), std::fabs(a.lines[i].y1 - b.lines[i].y1),
                       std::fabs(a.lines[i].x2 - b.lines[i].x2), std::fabs(a.lines[i].y2 - b.lines[i].y2)});
    }
    const double c = 3.0 * (span + 2.0 * 640.0 + norm(flows.fa) + norm(flows.fb));
    EXPECT_LE(max_step(g50), c / 50.0);
    const double ratio = max_step(g50) / max_step(g100);
    EXPECT_NEAR(ratio, 2.0, 0.2) << "trial " << trial;
  }
}

TEST(SummarizeFlow, UsesMatchedLinesOnly) {
  FlowField fa(100, 100), fb(100, 100, 0.0f, -2.0f);
  for (int y = 0; y < 100; ++y) {
    for (int x = 0; x < 100; ++x) fa.set(x, y, x < 50 ? 4.0f : -9.0f, 0.0f);
  }
  const LineSet la{{{10, 10, 30, 10}, {70, 70, 90, 70}}, 100, 100};
  const LineSet lb{{{10, 10, 30, 10}}, 100, 100};
  CorrespondenceSet pairs;
  pairs.pairs.push_back({0, 0, false, 0.0});
  const ForegroundMask m(100, 100, true);
  const FlowSummary s = summarize_flow(fa, fb, pairs, la, lb, m, m, 5, 0.5);
  EXPECT_EQ(s.fa, (Vec2{4.0, 0.0}));
  EXPECT_EQ(s.fb, (Vec2{0.0, -2.0}));
  EXPECT_EQ(s.scaled_fa(), (Vec2{2.0, 0.0}));
}
