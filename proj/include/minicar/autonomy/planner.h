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


#ifndef MINICAR_AUTONOMY_PLANNER_H_
#define MINICAR_AUTONOMY_PLANNER_H_

#include <cmath>
#include <cstdint>
#include <vector>

#include "minicar/autonomy/occupancy_grid.h"
#include "minicar/core/geometry.h"

namespace minicar {

// Boolean traversability grid used by the search.
struct BlockedGrid {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> blocked;

  BlockedGrid() = default;
  BlockedGrid(int w, int h) : width(w), height(h), blocked(static_cast<std::size_t>(w) * h, 0) {}
  bool Contains(GridIndex c) const { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; }
  bool Blocked(GridIndex c) const { return blocked[static_cast<std::size_t>(c.y) * width + c.x] != 0; }
  void Set(GridIndex c, bool b) { blocked[static_cast<std::size_t>(c.y) * width + c.x] = b; }
  bool Free(GridIndex c) const { return Contains(c) && !Blocked(c); }
};

struct PlannerParams {
  // Half the body diagonal plus a 0.02 m margin.
  double inflation_radius = 0.5 * std::hypot(0.22, 0.16) + 0.02;
  double occupied_threshold = 0.65;
};

// Cells with p > threshold, dilated by a disc of `radius`.
BlockedGrid InflateGrid(const OccupancyGrid& grid, double radius, double threshold = 0.65);

struct GridSearchResult {
  bool found = false;
  std::vector<GridIndex> cells;  // start to goal inclusive
  // Cost is straight + diagonal * sqrt(2), in cells.
  std::int64_t straight_steps = 0;
  std::int64_t diagonal_steps = 0;
  std::int64_t expanded = 0;

  double cost() const;
};

// 8-connected search. Diagonal moves require both adjacent orthogonal cells
// to be free. With `use_heuristic` false this degenerates to Dijkstra.
// Throws PlanningError(kInvalidEndpoint) for blocked or out-of-grid
// endpoints; returns found = false when no path exists.
GridSearchResult AStarSearch(const BlockedGrid& grid, GridIndex start, GridIndex goal,
                             bool use_heuristic = true);

struct PlannedPath {
  std::vector<GridIndex> cells;
  std::vector<Vec2> waypoints;
  Pose2 goal;
  double cost = 0.0;  // m
};

// Inflates `grid` and plans between the cells containing the two positions.
// Throws PlanningError with kInvalidEndpoint or kUnreachable.
PlannedPath AStarPlan(const OccupancyGrid& grid, GridIndex start, GridIndex goal,
                      const PlannerParams& params = {});

// Nearest free cell of `grid` to `c` within `max_radius` cells, searched in
// rings. Returns `c` itself when free; throws PlanningError otherwise.
GridIndex NearestFreeCell(const BlockedGrid& grid, GridIndex c, int max_radius);

struct ReplanParams {
  double lookahead = 0.5;
  double occupied_threshold = 0.65;
  // Occupied cells closer than this to a path cell count as blocking.
  double clearance = 0.0;
};

// Scans the path from the waypoint nearest to `pose` forward over
// `lookahead` metres. True when a cell there (or within `clearance`) is
// occupied in `live`.
bool ReplanNeeded(const OccupancyGrid& live, const PlannedPath& path, const Pose2& pose,
                  const ReplanParams& params = {});

}  // namespace minicar

#endif  // MINICAR_AUTONOMY_PLANNER_H_
