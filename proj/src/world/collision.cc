/*
 * Copyright 2026 The Minicar Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include "minicar/world/collision.h"

#include <algorithm>
#include <limits>

namespace minicar {

namespace {

template <std::size_t N, std::size_t M>
bool SeparatedAlong(Vec2 axis, const std::array<Vec2, N>& a, const std::array<Vec2, M>& b) {
  double a_lo = std::numeric_limits<double>::infinity(), a_hi = -a_lo;
  double b_lo = a_lo, b_hi = -a_lo;
  for (const Vec2& p : a) {
    const double d = Dot(p, axis);
    a_lo = std::min(a_lo, d);
    a_hi = std::max(a_hi, d);
  }
  for (const Vec2& p : b) {
    const double d = Dot(p, axis);
    b_lo = std::min(b_lo, d);
    b_hi = std::max(b_hi, d);
  }
  return a_hi < b_lo || b_hi < a_lo;
}

Vec2 Normal(Vec2 e) { return {-e.y, e.x}; }

}  // namespace

std::array<Vec2, 4> Footprint::Corners() const {
  const double hx = 0.5 * length;
  const double hy = 0.5 * width;
  const Vec2 c = pose.position();
  return {c + Rotate({hx, hy}, pose.yaw), c + Rotate({-hx, hy}, pose.yaw),
          c + Rotate({-hx, -hy}, pose.yaw), c + Rotate({hx, -hy}, pose.yaw)};
}

bool PolygonsOverlap(const std::array<Vec2, 4>& a, const std::array<Vec2, 4>& b) {
  for (const auto* poly : {&a, &b}) {
    for (int k = 0; k < 4; ++k) {
      const Vec2 axis = Normal((*poly)[(k + 1) % 4] - (*poly)[k]);
      if (SeparatedAlong(axis, a, b)) return false;
    }
  }
  return true;
}

bool PolygonSegmentOverlap(const std::array<Vec2, 4>& poly, const Segment& seg) {
  const std::array<Vec2, 2> s = {seg.a, seg.b};
  for (int k = 0; k < 4; ++k) {
    if (SeparatedAlong(Normal(poly[(k + 1) % 4] - poly[k]), poly, s)) return false;
  }
  const Vec2 e = seg.b - seg.a;
  if (e.x == 0.0 && e.y == 0.0) return true;
  return !SeparatedAlong(Normal(e), poly, s);
}

ContactReport Collide(const Footprint& footprint, const Scene& scene) {
  const auto body = footprint.Corners();
  for (std::size_t i = 0; i < scene.walls.size(); ++i) {
    if (PolygonSegmentOverlap(body, scene.walls[i])) {
      return {true, "wall[" + std::to_string(i) + "]"};
    }
  }
  for (std::size_t i = 0; i < scene.obstacles.size(); ++i) {
    if (PolygonsOverlap(body, scene.obstacles[i].Corners())) {
      return {true, "obstacle[" + std::to_string(i) + "]"};
    }
  }
  return {};
}

}  // namespace minicar
