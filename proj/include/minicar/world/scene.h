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

#ifndef MINICAR_WORLD_SCENE_H_
#define MINICAR_WORLD_SCENE_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "minicar/core/geometry.h"
#include "minicar/core/json_util.h"

namespace minicar {

struct Bounds {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  bool Contains(Vec2 p) const {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }
  friend bool operator==(const Bounds&, const Bounds&) = default;
};

// Oriented box. `extents` are the full side lengths along the box's own x
// and y axes.
struct Obstacle {
  Vec2 center;
  Vec2 extents;
  double yaw = 0.0;
  // Present in the live world (LIDAR, collisions) but never in the static
  // map handed to autonomy.
  bool unmapped = false;

  std::array<Vec2, 4> Corners() const;
  friend bool operator==(const Obstacle&, const Obstacle&) = default;
};

struct Scene {
  std::string name;
  Bounds bounds;
  std::vector<Segment> walls;
  std::vector<Obstacle> obstacles;
  std::vector<Vec2> centerline;  // closed loop when non-empty
  Pose2 spawn;

  friend bool operator==(const Scene&, const Scene&) = default;
};

// Parses and validates a scene document:
//   {"name": ..., "bounds": [min_x, min_y, max_x, max_y],
//    "walls": [[x1, y1, x2, y2], ...],
//    "obstacles": [{"center": [x, y], "extents": [sx, sy], "yaw": r}, ...],
//    "centerline": [[x, y], ...], "spawn": [x, y, yaw]}
// Throws ParseError for malformed structure (message names the key) and
// ValidationError for geometry outside the bounds or degenerate boxes.
Scene LoadScene(const Json& doc);
Scene LoadSceneFile(const std::filesystem::path& path);
Json SceneToJson(const Scene& scene);

// Throws ValidationError naming the offending feature.
void ValidateScene(const Scene& scene);

// Wall segments followed by the four edges of every obstacle. Unmapped
// obstacles are skipped unless `include_unmapped`.
std::vector<Segment> SceneSegments(const Scene& scene, bool include_unmapped = true);

// The scene as known to the autonomy stack: unmapped obstacles removed.
Scene StaticMapScene(const Scene& scene);

struct PerturbationSigmas {
  double xy = 0.01;     // m
  double theta = 0.087;  // rad
};

// Independently perturbs each wall (about its midpoint) and each obstacle by
// seeded Gaussian draws. Geometry pushed outside the bounds is clamped back
// inside and a warning is appended to `warnings` when provided.
Scene PerturbScene(const Scene& scene, const PerturbationSigmas& sigmas, std::uint64_t seed,
                   std::vector<std::string>* warnings = nullptr);

// Appends an unmapped box. Throws ValidationError if it leaves the bounds.
Scene SpawnUnmappedObstacle(const Scene& scene, const Pose2& pose, Vec2 extents);

// Removes the obstacle at `index`. Throws std::out_of_range.
Scene RemoveObstacle(const Scene& scene, std::size_t index);

// Signed arc-length position of `p` projected onto the closed centerline,
// in [0, CenterlineLength). Requires a non-empty centerline.
double CenterlineProgress(const Scene& scene, Vec2 p);
double CenterlineLength(const Scene& scene);

}  // namespace minicar

#endif  // MINICAR_WORLD_SCENE_H_
