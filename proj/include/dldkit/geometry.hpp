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

#ifndef DLDKIT_GEOMETRY_HPP_
#define DLDKIT_GEOMETRY_HPP_

#include <array>
#include <span>

namespace dldkit::geometry {

// Points below this distance from a clip line count as on the line (pixels).
inline constexpr double kClipEpsilon = 1e-9;
// Unions below this area produce an IoU of 0.
inline constexpr double kMinUnionArea = 1e-12;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

// Four vertices; counter-clockwise means positive shoelace area in (x, y).
using Quad = std::array<Point, 4>;

// A rotated rectangle. `angle` rotates the width axis counter-clockwise from
// +x, in radians. No canonicalization of (w, h, angle) is applied.
class OrientedBox {
 public:
  // Throws Error(kInvalidArgument) unless w and h are finite and positive and
  // the center and angle are finite.
  OrientedBox(double cx, double cy, double w, double h, double angle);

  double cx() const { return cx_; }
  double cy() const { return cy_; }
  double width() const { return w_; }
  double height() const { return h_; }
  double angle() const { return angle_; }
  double area() const { return w_ * h_; }

 private:
  double cx_;
  double cy_;
  double w_;
  double h_;
  double angle_;
};

// Corners in CCW order starting at the (+w/2, +h/2) local corner.
Quad ToCorners(const OrientedBox& box);

// Shoelace area; positive for CCW vertex order.
double SignedArea(std::span<const Point> polygon);

// Returns the quad unchanged if CCW, otherwise reversed keeping vertex 0.
Quad MakeCounterClockwise(const Quad& quad);

// Area of the intersection of two convex CCW quads (Sutherland-Hodgman
// clipping followed by the shoelace formula). Symmetric in its arguments.
double ConvexIntersectionArea(const Quad& a, const Quad& b);

// IoU of two convex CCW quads, in [0, 1].
double QuadIou(const Quad& a, const Quad& b);

double RotatedIou(const OrientedBox& a, const OrientedBox& b);

}  // namespace dldkit::geometry

#endif  // DLDKIT_GEOMETRY_HPP_
