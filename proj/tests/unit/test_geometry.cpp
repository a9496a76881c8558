/* Copyright 2026 The dldkit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "dldkit/geometry.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dldkit/error.hpp"
#include "oracles.hpp"

namespace dldkit::geometry {
namespace {

TEST(OrientedBox, RejectsDegenerateAndNonFinite) {
  EXPECT_THROW(OrientedBox(0, 0, 0, 1, 0), Error);
  EXPECT_THROW(OrientedBox(0, 0, 1, -2, 0), Error);
  EXPECT_THROW(OrientedBox(NAN, 0, 1, 1, 0), Error);
  EXPECT_THROW(OrientedBox(0, 0, 1, 1, INFINITY), Error);
  try {
    OrientedBox(0, 0, 0, 1, 0);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(ToCorners, AxisAlignedOrderIsCounterClockwise) {
  const Quad q = ToCorners(OrientedBox(1, 2, 4, 2, 0));
  EXPECT_EQ(q[0], (Point{3, 3}));
  EXPECT_EQ(q[1], (Point{-1, 3}));
  EXPECT_EQ(q[2], (Point{-1, 1}));
  EXPECT_EQ(q[3], (Point{3, 1}));
  EXPECT_DOUBLE_EQ(SignedArea(q), 8.0);
}

TEST(ToCorners, RotationPreservesArea) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.1, 50.0);
  std::uniform_real_distribution<double> a(-7.0, 7.0);
  for (int i = 0; i < 100; ++i) {
    const OrientedBox b(u(rng), u(rng), u(rng), u(rng), a(rng));
    EXPECT_NEAR(SignedArea(ToCorners(b)), b.area(), 1e-9 * b.area());
  }
}

TEST(MakeCounterClockwise, ReversesClockwiseKeepingFirstVertex) {
  const Quad cw = {Point{0, 0}, Point{0, 1}, Point{1, 1}, Point{1, 0}};
  const Quad ccw = MakeCounterClockwise(cw);
  EXPECT_EQ(ccw[0], cw[0]);
  EXPECT_GT(SignedArea(ccw), 0.0);
  EXPECT_EQ(MakeCounterClockwise(ccw), ccw);
}

TEST(RotatedIou, SquareAgainstItsDiagonalRotation) {
  const OrientedBox a(0, 0, 2, 2, 0);
  const OrientedBox b(0, 0, 2, 2, std::numbers::pi / 4);
  const double inter = 8 * std::sqrt(2.0) - 8;
  EXPECT_NEAR(ConvexIntersectionArea(ToCorners(a), ToCorners(b)), inter, 1e-12);
  EXPECT_NEAR(RotatedIou(a, b), inter / (8 - inter), 1e-12);
  EXPECT_NEAR(RotatedIou(a, b), std::sqrt(0.5), 1e-12);
}

TEST(RotatedIou, IdenticalDisjointAndTouching) {
  const OrientedBox a(10, 10, 4, 3, 0.3);
  EXPECT_NEAR(RotatedIou(a, a), 1.0, 1e-12);
  EXPECT_EQ(RotatedIou(a, OrientedBox(100, 100, 4, 3, 0.3)), 0.0);
  // Shared edge only.
  EXPECT_NEAR(RotatedIou(OrientedBox(0, 0, 2, 2, 0), OrientedBox(2, 0, 2, 2, 0)),
              0.0, 1e-12);
}

TEST(RotatedIou, NestedBoxIsAreaRatio) {
  const OrientedBox outer(5, 5, 10, 8, 0.7);
  const OrientedBox inner(5, 5, 2, 1, 1.9);
  EXPECT_NEAR(RotatedIou(outer, inner), 2.0 / 80.0, 1e-12);
}

TEST(RotatedIou, HalfTurnIsSameBox) {
  const OrientedBox a(3, -4, 6, 2, 0.4);
  const OrientedBox b(3, -4, 6, 2, 0.4 + std::numbers::pi);
  const OrientedBox c(3, -4, 2, 6, 0.4 + std::numbers::pi / 2);
  EXPECT_NEAR(RotatedIou(a, b), 1.0, 1e-12);
  EXPECT_NEAR(RotatedIou(a, c), 1.0, 1e-12);
}

TEST(RotatedIou, BitwiseSymmetric) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const auto [a, b] = testing_oracles::RandomOverlappingPair(rng);
    EXPECT_EQ(RotatedIou(a, b), RotatedIou(b, a));
  }
}

TEST(RotatedIou, AxisAlignedClosedForm) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> c(0.0, 20.0);
  std::uniform_real_distribution<double> s(0.5, 15.0);
  for (int i = 0; i < 100; ++i) {
    const OrientedBox a(c(rng), c(rng), s(rng), s(rng), 0.0);
    const OrientedBox b(c(rng), c(rng), s(rng), s(rng), 0.0);
    EXPECT_NEAR(RotatedIou(a, b), testing_oracles::AxisAlignedIou(a, b), 1e-12);
  }
}

TEST(RotatedIou, MatchesMonteCarloOracle) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const auto [a, b] = testing_oracles::RandomOverlappingPair(rng);
    const double mc = testing_oracles::MonteCarloIou(a, b, 200000, 100 + i);
    EXPECT_NEAR(RotatedIou(a, b), mc, 0.01);
  }
}

TEST(RotatedIou, FarFromOriginStaysAccurate) {
  const OrientedBox a(1e6, 1e6, 4, 2, 0.25);
  const OrientedBox b(1e6 + 1, 1e6, 4, 2, 0.25);
  // Shifting along the width axis by 1 keeps overlap 3x2 out of union 10.
  const OrientedBox c(1e6 + std::cos(0.25), 1e6 + std::sin(0.25), 4, 2, 0.25);
  EXPECT_NEAR(RotatedIou(a, c), 6.0 / 10.0, 1e-6);
  EXPECT_GT(RotatedIou(a, b), 0.0);
}

TEST(QuadIou, ZeroAreaUnionYieldsZero) {
  const Quad p = {Point{1, 1}, Point{1, 1}, Point{1, 1}, Point{1, 1}};
  EXPECT_EQ(QuadIou(p, p), 0.0);
}

}  // namespace
}  // namespace dldkit::geometry
