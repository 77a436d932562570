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


#include "minicar/autonomy/planner.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "minicar/core/error.h"

namespace minicar {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

struct Move {
  int dx, dy;
  bool diagonal;
};

constexpr Move kMoves[8] = {{1, 0, false},  {-1, 0, false}, {0, 1, false},  {0, -1, false},
                            {1, 1, true},   {1, -1, true},  {-1, 1, true},  {-1, -1, true}};

struct QueueEntry {
  double f;
  std::uint64_t order;
  int index;
  bool operator>(const QueueEntry& o) const { return f != o.f ? f > o.f : order > o.order; }
};

std::string CellText(GridIndex c) {
  return "(" + std::to_string(c.x) + ", " + std::to_string(c.y) + ")";
}

}  // namespace

double GridSearchResult::cost() const {
  return static_cast<double>(straight_steps) + static_cast<double>(diagonal_steps) * kSqrt2;
}

BlockedGrid InflateGrid(const OccupancyGrid& grid, double radius, double threshold) {
  BlockedGrid out(grid.width(), grid.height());
  const double l_threshold = ProbabilityToLogOdds(threshold);
  const int r = static_cast<int>(std::ceil(radius / grid.resolution()));
  const double r2 = (radius / grid.resolution()) * (radius / grid.resolution());
  std::vector<GridIndex> disc;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      if (dx * dx + dy * dy <= r2) disc.push_back({dx, dy});
    }
  }
  for (int y = 0; y < grid.height(); ++y) {
    for (int x = 0; x < grid.width(); ++x) {
      if (!(grid.LogOdds({x, y}) > l_threshold)) continue;
      for (const GridIndex& d : disc) {
        const GridIndex c{x + d.x, y + d.y};
        if (out.Contains(c)) out.Set(c, true);
      }
    }
  }
  return out;
}

GridSearchResult AStarSearch(const BlockedGrid& grid, GridIndex start, GridIndex goal,
                             bool use_heuristic) {
  if (!grid.Free(start)) {
    throw PlanningError(PlanningError::Kind::kInvalidEndpoint,
                        "start cell " + CellText(start) + " is blocked or outside the grid");
  }
  if (!grid.Free(goal)) {
    throw PlanningError(PlanningError::Kind::kInvalidEndpoint,
                        "goal cell " + CellText(goal) + " is blocked or outside the grid");
  }
  const int w = grid.width;
  const std::size_t n = static_cast<std::size_t>(w) * grid.height;
  auto flat = [w](GridIndex c) { return c.y * w + c.x; };
  auto heuristic = [&](GridIndex c) {
    return use_heuristic ? std::hypot(c.x - goal.x, c.y - goal.y) : 0.0;
  };

  std::vector<std::int64_t> straight(n, -1), diagonal(n, -1);
  std::vector<int> parent(n, -1);
  std::vector<std::uint8_t> closed(n, 0);
  auto g_of = [&](int i) {
    return static_cast<double>(straight[i]) + static_cast<double>(diagonal[i]) * kSqrt2;
  };

  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> open;
  std::uint64_t order = 0;
  const int s = flat(start), t = flat(goal);
  straight[s] = 0;
  diagonal[s] = 0;
  open.push({heuristic(start), order++, s});

  GridSearchResult result;
  while (!open.empty()) {
    const QueueEntry top = open.top();
    open.pop();
    if (closed[top.index]) continue;
    closed[top.index] = 1;
    ++result.expanded;
    if (top.index == t) break;
    const GridIndex c{top.index % w, top.index / w};
    for (const Move& st : kMoves) {
      const GridIndex nb{c.x + st.dx, c.y + st.dy};
      if (!grid.Free(nb)) continue;
      if (st.diagonal && (!grid.Free({c.x + st.dx, c.y}) || !grid.Free({c.x, c.y + st.dy}))) {
        continue;
      }
      const int j = flat(nb);
      const std::int64_t ns = straight[top.index] + (st.diagonal ? 0 : 1);
      const std::int64_t nd = diagonal[top.index] + (st.diagonal ? 1 : 0);
      const double ng = static_cast<double>(ns) + static_cast<double>(nd) * kSqrt2;
      if (straight[j] >= 0 && !(ng < g_of(j))) continue;
      straight[j] = ns;
      diagonal[j] = nd;
      parent[j] = top.index;
      closed[j] = 0;
      open.push({ng + heuristic(nb), order++, j});
    }
  }
  if (!closed[t]) return result;
  result.found = true;
  result.straight_steps = straight[t];
  result.diagonal_steps = diagonal[t];
  for (int i = t; i != -1; i = parent[i]) result.cells.push_back({i % w, i / w});
  std::reverse(result.cells.begin(), result.cells.end());
  return result;
}

PlannedPath AStarPlan(const OccupancyGrid& grid, GridIndex start, GridIndex goal,
                      const PlannerParams& params) {
  const BlockedGrid blocked = InflateGrid(grid, params.inflation_radius, params.occupied_threshold);
  const GridSearchResult r = AStarSearch(blocked, start, goal);
  if (!r.found) {
    throw PlanningError(PlanningError::Kind::kUnreachable,
                        "no path from " + CellText(start) + " to " + CellText(goal));
  }
  PlannedPath path;
  path.cells = r.cells;
  for (const GridIndex& c : r.cells) path.waypoints.push_back(grid.CellCenter(c));
  const Vec2 g = grid.CellCenter(goal);
  path.goal = {g.x, g.y, 0.0};
  path.cost = r.cost() * grid.resolution();
  return path;
}

GridIndex NearestFreeCell(const BlockedGrid& grid, GridIndex c, int max_radius) {
  if (grid.Free(c)) return c;
  for (int r = 1; r <= max_radius; ++r) {
    GridIndex best{};
    double best_d = std::numeric_limits<double>::infinity();
    for (int dy = -r; dy <= r; ++dy) {
      for (int dx = -r; dx <= r; ++dx) {
        if (std::max(std::abs(dx), std::abs(dy)) != r) continue;
        const GridIndex n{c.x + dx, c.y + dy};
        const double d = std::hypot(dx, dy);
        if (grid.Free(n) && d < best_d) {
          best = n;
          best_d = d;
        }
      }
    }
    if (std::isfinite(best_d)) return best;
  }
  throw PlanningError(PlanningError::Kind::kInvalidEndpoint,
                      "no free cell near " + CellText(c));
}

bool ReplanNeeded(const OccupancyGrid& live, const PlannedPath& path, const Pose2& pose,
                  const ReplanParams& params) {
  if (path.waypoints.empty()) return false;
  std::size_t nearest = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < path.waypoints.size(); ++i) {
    const double d = Norm(path.waypoints[i] - pose.position());
    if (d < best) {
      best = d;
      nearest = i;
    }
  }
  const double l_threshold = ProbabilityToLogOdds(params.occupied_threshold);
  const int r = static_cast<int>(std::ceil(params.clearance / live.resolution()));
  const double r2 = (params.clearance / live.resolution()) * (params.clearance / live.resolution());
  double travelled = 0.0;
  for (std::size_t i = nearest; i < path.waypoints.size(); ++i) {
    if (i > nearest) travelled += Norm(path.waypoints[i] - path.waypoints[i - 1]);
    if (travelled > params.lookahead) break;
    const GridIndex c = live.CellOf(path.waypoints[i]);
    for (int dy = -r; dy <= r; ++dy) {
      for (int dx = -r; dx <= r; ++dx) {
        if (dx * dx + dy * dy > r2) continue;
        const GridIndex n{c.x + dx, c.y + dy};
        if (live.Contains(n) && live.LogOdds(n) > l_threshold) return true;
      }
    }
  }
  return false;
}

}  // namespace minicar
