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

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dldkit/error.hpp"

namespace dldkit::geometry {

namespace {

// Convex clipping of a quad by four half-planes yields at most 8 vertices.
struct ClipBuffer {
  std::array<Point, 16> v;
  int n = 0;

  void push(const Point& p) { v[n++] = p; }
  std::span<const Point> view() const { return {v.data(), static_cast<size_t>(n)}; }
};

// Signed distance of p from the directed line a->b; positive on the left.
double SignedDistance(const Point& a, const Point& b, const Point& p) {
  const double ex = b.x - a.x;
  const double ey = b.y - a.y;
  const double len = std::hypot(ex, ey);
  const double cross = ex * (p.y - a.y) - ey * (p.x - a.x);
  return len > 0.0 ? cross / len : 0.0;
}

bool LexLess(const Quad& a, const Quad& b) {
  for (int i = 0; i < 4; ++i) {
    if (a[i].x != b[i].x) return a[i].x < b[i].x;
    if (a[i].y != b[i].y) return a[i].y < b[i].y;
  }
  return false;
}

double ClipArea(const Quad& subject, const Quad& clip) {
  ClipBuffer current;
  for (const Point& p : subject) current.push(p);

  for (int e = 0; e < 4 && current.n > 0; ++e) {
    const Point& a = clip[e];
    const Point& b = clip[(e + 1) % 4];
    ClipBuffer next;
    for (int i = 0; i < current.n; ++i) {
      const Point& p = current.v[i];
      const Point& q = current.v[(i + 1) % current.n];
      const double dp = SignedDistance(a, b, p);
      const double dq = SignedDistance(a, b, q);
      const bool p_in = dp >= -kClipEpsilon;
      const bool q_in = dq >= -kClipEpsilon;
      if (p_in) next.push(p);
      if (p_in != q_in) {
        const double t = dp / (dp - dq);
        next.push({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
      }
    }
    current = next;
  }
  if (current.n < 3) return 0.0;
  return std::max(0.0, SignedArea(current.view()));
}

}  // namespace

OrientedBox::OrientedBox(double cx, double cy, double w, double h, double angle)
    : cx_(cx), cy_(cy), w_(w), h_(h), angle_(angle) {
  const bool finite = std::isfinite(cx) && std::isfinite(cy) &&
                      std::isfinite(w) && std::isfinite(h) &&
                      std::isfinite(angle);
  if (!finite || !(w > 0.0) || !(h > 0.0)) {
    std::ostringstream msg;
    msg << "invalid oriented box (cx=" << cx << ", cy=" << cy << ", w=" << w
        << ", h=" << h << ", angle=" << angle << ")";
    throw Error(ErrorCode::kInvalidArgument, msg.str());
  }
}

Quad ToCorners(const OrientedBox& box) {
  const double c = std::cos(box.angle());
  const double s = std::sin(box.angle());
  const double hw = 0.5 * box.width();
  const double hh = 0.5 * box.height();
  const std::array<Point, 4> local = {
      Point{hw, hh}, Point{-hw, hh}, Point{-hw, -hh}, Point{hw, -hh}};
  Quad out;
  for (int i = 0; i < 4; ++i) {
    out[i] = {box.cx() + c * local[i].x - s * local[i].y,
              box.cy() + s * local[i].x + c * local[i].y};
  }
  return out;
}

double SignedArea(std::span<const Point> polygon) {
  const size_t n = polygon.size();
  if (n < 3) return 0.0;
  // Shoelace relative to the first vertex to limit cancellation for boxes far
  // from the origin.
  const Point& o = polygon[0];
  double twice = 0.0;
  for (size_t i = 1; i + 1 < n; ++i) {
    const double ax = polygon[i].x - o.x;
    const double ay = polygon[i].y - o.y;
    const double bx = polygon[i + 1].x - o.x;
    const double by = polygon[i + 1].y - o.y;
    twice += ax * by - ay * bx;
  }
  return 0.5 * twice;
}

Quad MakeCounterClockwise(const Quad& quad) {
  if (SignedArea(quad) >= 0.0) return quad;
  return {quad[0], quad[3], quad[2], quad[1]};
}

double ConvexIntersectionArea(const Quad& a, const Quad& b) {
  // Canonical argument order makes the result bitwise symmetric.
  if (LexLess(b, a)) return ClipArea(b, a);
  return ClipArea(a, b);
}

double QuadIou(const Quad& a, const Quad& b) {
  const double inter = ConvexIntersectionArea(a, b);
  const double uni = std::abs(SignedArea(a)) + std::abs(SignedArea(b)) - inter;
  if (!(uni >= kMinUnionArea)) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double RotatedIou(const OrientedBox& a, const OrientedBox& b) {
  return QuadIou(ToCorners(a), ToCorners(b));
}

}  // namespace dldkit::geometry
