#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

using namespace lineguide;

namespace {

void expect_line_near(const LineSegment& got, const LineSegment& want, double tol) {
  EXPECT_NEAR(got.x1, want.x1, tol);
  EXPECT_NEAR(got.y1, want.y1, tol);
  EXPECT_NEAR(got.x2, want.x2, tol);
  EXPECT_NEAR(got.y2, want.y2, tol);
}

BoundingBox random_box(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-500.0, 500.0), ext(0.5, 400.0);
  return {pos(rng), pos(rng), ext(rng), ext(rng)};
}

LineSegment random_line(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-800.0, 800.0);
  return {d(rng), d(rng), d(rng), d(rng)};
}

}  // namespace

TEST(LineCenter, Examples) {
  EXPECT_EQ(line_center(LineSegment{0, 0, 2, 2}), (Vec2{1, 1}));
  EXPECT_EQ(line_center(LineSegment{3, 5, 3, 5}), (Vec2{3, 5}));
  EXPECT_EQ(line_center(LineSegment{1, 0, 4, 6}), (Vec2{2.5, 3}));
}

TEST(Normalize, BoxCornersMapToUnitCorners) {
  EXPECT_EQ(normalize_line({10, 10, 20, 20}, {15, 15, 10, 10}), (CanonicalLine{0, 0, 1, 1}));
  EXPECT_EQ(normalize_line({15, 15, 15, 15}, {15, 15, 10, 10}), (CanonicalLine{0.5, 0.5, 0.5, 0.5}));
}

TEST(Normalize, AnisotropicBox) {
  // x: (10 - 5)/20, (20 - 5)/20; y: (10 - 10)/10, (20 - 10)/10
  EXPECT_EQ(normalize_line({10, 10, 20, 20}, {15, 15, 20, 10}), (CanonicalLine{0.25, 0, 0.75, 1}));
}

TEST(Denormalize, Examples) {
  EXPECT_EQ(denormalize_line({0, 0, 1, 1}, {15, 15, 10, 10}), (LineSegment{10, 10, 20, 20}));
  const BoundingBox b{-3.25, 71.5, 13.0, 7.75};
  EXPECT_EQ(denormalize_line({0.5, 0.5, 0.5, 0.5}, b), (LineSegment{b.cx, b.cy, b.cx, b.cy}));
}

TEST(Normalize, DegenerateBoxThrows) {
  try {
    normalize_line({0, 0, 1, 1}, {5, 5, 0, 3});
    FAIL() << "expected DegenerateBox";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::degenerate_box);
  }
  EXPECT_THROW(denormalize_line({0, 0, 1, 1}, {5, 5, 3, -1}), Error);
}

TEST(Normalize, RoundTripRandom) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    const BoundingBox b = random_box(rng);
    const LineSegment l = random_line(rng);
    expect_line_near(denormalize_line(normalize_line(l, b), b), l, 1e-9);
  }
}

TEST(Normalize, CenterCommutesWithBoxTransform) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> c(-0.5, 1.5);
  for (int i = 0; i < 1000; ++i) {
    const BoundingBox b = random_box(rng);
    const CanonicalLine lc{c(rng), c(rng), c(rng), c(rng)};
    const Vec2 lhs = line_center(denormalize_line(lc, b));
    const Vec2 rhs = denormalize_point(line_center(lc), b);
    EXPECT_NEAR(lhs.x, rhs.x, 1e-9);
    EXPECT_NEAR(lhs.y, rhs.y, 1e-9);
  }
}

TEST(BoundingBox, ClampRaisesThinExtentsAroundCenter) {
  const BoundingBox b = BoundingBox{10.5, 20.5, 1, 0.25}.clamped();
  EXPECT_EQ(b, (BoundingBox{10.5, 20.5, 2, 2}));
  EXPECT_EQ((BoundingBox{1, 2, 30, 40}.clamped()), (BoundingBox{1, 2, 30, 40}));
}

TEST(Angles, UndirectedDifferenceFolds) {
  const LineSegment h{0, 0, 1, 0}, v{0, 0, 0, 1}, h_rev{1, 0, 0, 0};
  EXPECT_NEAR(undirected_angle_between(h, v), std::numbers::pi / 2, 1e-12);
  EXPECT_NEAR(undirected_angle_between(h, h_rev), 0.0, 1e-12);
  const LineSegment d{0, 0, 1, 1}, d2{0, 0, -1, 1};
  EXPECT_NEAR(undirected_angle_between(d, d2), std::numbers::pi / 2, 1e-12);
}

TEST(ClampToFrame, ClampsEachCoordinate) {
  EXPECT_EQ(clamp_to_frame({120, 20, -4, 60}, 100, 50), (LineSegment{100, 20, 0, 50}));
}
