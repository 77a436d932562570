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


#ifndef MINICAR_AUTONOMY_OCCUPANCY_GRID_H_
#define MINICAR_AUTONOMY_OCCUPANCY_GRID_H_

#include <filesystem>
#include <vector>

#include "minicar/core/geometry.h"
#include "minicar/sensors/sensors.h"
#include "minicar/world/scene.h"

namespace minicar {

struct GridIndex {
  int x = 0;
  int y = 0;
  friend bool operator==(GridIndex, GridIndex) = default;
};

struct MapUpdateParams {
  double l_free = 0.4;
  double l_occ = 0.85;
  double clamp = 10.0;
};

double LogOddsToProbability(double l);
double ProbabilityToLogOdds(double p);

// Log-odds occupancy grid. Cell (x, y) covers
// [origin.x + x*res, origin.x + (x+1)*res) and likewise in y.
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  OccupancyGrid(double resolution, Vec2 origin, int width, int height);

  // Grid covering `bounds` plus `margin` on every side.
  static OccupancyGrid ForBounds(const Bounds& bounds, double resolution = 0.02,
                                 double margin = 0.1);

  double resolution() const { return resolution_; }
  Vec2 origin() const { return origin_; }
  int width() const { return width_; }
  int height() const { return height_; }
  const std::vector<double>& cells() const { return cells_; }

  bool Contains(GridIndex c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  bool Contains(Vec2 p) const { return Contains(CellOf(p)); }
  GridIndex CellOf(Vec2 p) const;
  Vec2 CellCenter(GridIndex c) const;

  double LogOdds(GridIndex c) const { return cells_[Flat(c)]; }
  double Probability(GridIndex c) const { return LogOddsToProbability(LogOdds(c)); }
  void SetLogOdds(GridIndex c, double l, double clamp = 10.0);
  void AddLogOdds(GridIndex c, double delta, double clamp = 10.0);

  // Inserts one scan taken at `pose`. Cells traversed by each beam (integer
  // line from the pose cell, endpoint excluded) lose l_free and the endpoint
  // cell gains l_occ. Beams without a return are skipped. Throws
  // std::out_of_range if the pose is outside the grid.
  void Insert(const Pose2& pose, const LidarScan& scan, const MapUpdateParams& params = {});

  // P5 graymap (white = free, black = occupied, top row = max y) plus a JSON
  // sidecar with resolution, origin and size. Loading recovers log-odds from
  // the 8-bit gray levels, so it is lossy.
  void Save(const std::filesystem::path& pgm_path) const;
  static OccupancyGrid Load(const std::filesystem::path& pgm_path);

  friend bool operator==(const OccupancyGrid&, const OccupancyGrid&) = default;

 private:
  std::size_t Flat(GridIndex c) const {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(c.x);
  }

  double resolution_ = 0.02;
  Vec2 origin_;
  int width_ = 0;
  int height_ = 0;
  std::vector<double> cells_;
};

// Integer line traversal (Bresenham) from a to b, both endpoints included.
std::vector<GridIndex> TraceLine(GridIndex a, GridIndex b);

std::filesystem::path GridSidecarPath(const std::filesystem::path& pgm_path);

}  // namespace minicar

#endif  // MINICAR_AUTONOMY_OCCUPANCY_GRID_H_
