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

#ifndef MINICAR_WORLD_COLLISION_H_
#define MINICAR_WORLD_COLLISION_H_

#include <array>
#include <string>

#include "minicar/core/geometry.h"
#include "minicar/world/scene.h"

namespace minicar {

// Vehicle body rectangle centered on `pose`.
struct Footprint {
  Pose2 pose;
  double length = 0.22;
  double width = 0.16;

  std::array<Vec2, 4> Corners() const;
};

struct ContactReport {
  bool contact = false;
  // "wall[i]" or "obstacle[i]" for the first feature found, empty otherwise.
  std::string feature;
};

// Separating-axis tests in closed-set convention: touching counts.
bool PolygonsOverlap(const std::array<Vec2, 4>& a, const std::array<Vec2, 4>& b);
bool PolygonSegmentOverlap(const std::array<Vec2, 4>& poly, const Segment& seg);

// Walls are tested before obstacles, each in scene order.
ContactReport Collide(const Footprint& footprint, const Scene& scene);

}  // namespace minicar

#endif  // MINICAR_WORLD_COLLISION_H_
