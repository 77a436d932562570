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


#include "minicar/autonomy/occupancy_grid.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "minicar/core/error.h"
#include "minicar/core/json_util.h"

namespace minicar {

double LogOddsToProbability(double l) { return 1.0 - 1.0 / (1.0 + std::exp(l)); }

double ProbabilityToLogOdds(double p) { return std::log(p / (1.0 - p)); }

OccupancyGrid::OccupancyGrid(double resolution, Vec2 origin, int width, int height)
    : resolution_(resolution), origin_(origin), width_(width), height_(height) {
  if (!(resolution > 0.0) || width <= 0 || height <= 0) {
    throw std::invalid_argument("grid needs positive resolution and size");
  }
  cells_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0.0);
}

OccupancyGrid OccupancyGrid::ForBounds(const Bounds& b, double resolution, double margin) {
  const int w = static_cast<int>(std::ceil((b.max_x - b.min_x + 2.0 * margin) / resolution));
  const int h = static_cast<int>(std::ceil((b.max_y - b.min_y + 2.0 * margin) / resolution));
  return OccupancyGrid(resolution, {b.min_x - margin, b.min_y - margin}, w, h);
}

GridIndex OccupancyGrid::CellOf(Vec2 p) const {
  return {static_cast<int>(std::floor((p.x - origin_.x) / resolution_)),
          static_cast<int>(std::floor((p.y - origin_.y) / resolution_))};
}

Vec2 OccupancyGrid::CellCenter(GridIndex c) const {
  return {origin_.x + (c.x + 0.5) * resolution_, origin_.y + (c.y + 0.5) * resolution_};
}

void OccupancyGrid::SetLogOdds(GridIndex c, double l, double clamp) {
  cells_[Flat(c)] = std::clamp(l, -clamp, clamp);
}

void OccupancyGrid::AddLogOdds(GridIndex c, double delta, double clamp) {
  double& v = cells_[Flat(c)];
  v = std::clamp(v + delta, -clamp, clamp);
}

std::vector<GridIndex> TraceLine(GridIndex a, GridIndex b) {
  std::vector<GridIndex> out;
  const int dx = std::abs(b.x - a.x), sx = a.x < b.x ? 1 : -1;
  const int dy = -std::abs(b.y - a.y), sy = a.y < b.y ? 1 : -1;
  int err = dx + dy;
  GridIndex c = a;
  while (true) {
    out.push_back(c);
    if (c == b) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      c.x += sx;
    }
    if (e2 <= dx) {
      err += dx;
      c.y += sy;
    }
  }
  return out;
}

void OccupancyGrid::Insert(const Pose2& pose, const LidarScan& scan,
                           const MapUpdateParams& params) {
  const GridIndex start = CellOf(pose.position());
  if (!Contains(start)) throw std::out_of_range("map update pose outside grid");
  for (std::size_t i = 0; i < scan.ranges.size(); ++i) {
    const double r = scan.ranges[i];
    if (!std::isfinite(r)) continue;
    const double bearing = pose.yaw + scan.angle_min + static_cast<double>(i) * scan.angle_increment;
    const GridIndex end = CellOf(pose.position() + r * Vec2{std::cos(bearing), std::sin(bearing)});
    const std::vector<GridIndex> line = TraceLine(start, end);
    for (std::size_t k = 0; k + 1 < line.size(); ++k) {
      if (!Contains(line[k])) break;
      AddLogOdds(line[k], -params.l_free, params.clamp);
    }
    if (Contains(end)) AddLogOdds(end, params.l_occ, params.clamp);
  }
}

std::filesystem::path GridSidecarPath(const std::filesystem::path& pgm_path) {
  std::filesystem::path p = pgm_path;
  p.replace_extension(".json");
  return p;
}

void OccupancyGrid::Save(const std::filesystem::path& pgm_path) const {
  std::ofstream out(pgm_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + pgm_path.string());
  out << "P5\n" << width_ << " " << height_ << "\n255\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(width_));
  for (int y = height_ - 1; y >= 0; --y) {
    for (int x = 0; x < width_; ++x) {
      const double p = Probability({x, y});
      row[static_cast<std::size_t>(x)] = static_cast<unsigned char>(std::lround(255.0 * (1.0 - p)));
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  if (!out) throw std::runtime_error("write failed: " + pgm_path.string());
  WriteJsonFile(GridSidecarPath(pgm_path), {{"image", pgm_path.filename().string()},
                                           {"resolution", resolution_},
                                           {"origin", {origin_.x, origin_.y}},
                                           {"width", width_},
                                           {"height", height_}});
}

OccupancyGrid OccupancyGrid::Load(const std::filesystem::path& pgm_path) {
  const Json meta = ReadJsonFile(GridSidecarPath(pgm_path));
  const double res = RequireNumber(meta, "resolution", "grid");
  const Json& origin = RequireArray(meta, "origin", "grid");
  if (origin.size() != 2) throw ParseError("grid.origin: expected [x, y]");
  std::ifstream in(pgm_path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + pgm_path.string());
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  in.get();
  if (magic != "P5" || maxval != 255 || w <= 0 || h <= 0) {
    throw ParseError(pgm_path.string() + ": not an 8-bit P5 graymap");
  }
  if (w != static_cast<int>(RequireNumber(meta, "width", "grid")) ||
      h != static_cast<int>(RequireNumber(meta, "height", "grid"))) {
    throw ParseError(pgm_path.string() + ": size disagrees with sidecar");
  }
  OccupancyGrid grid(res, {origin[0].get<double>(), origin[1].get<double>()}, w, h);
  std::vector<unsigned char> row(static_cast<std::size_t>(w));
  for (int y = h - 1; y >= 0; --y) {
    in.read(reinterpret_cast<char*>(row.data()), w);
    if (!in) throw ParseError(pgm_path.string() + ": truncated image");
    for (int x = 0; x < w; ++x) {
      const double p = std::clamp(1.0 - row[static_cast<std::size_t>(x)] / 255.0, 1e-4, 1.0 - 1e-4);
      grid.SetLogOdds({x, y}, ProbabilityToLogOdds(p));
    }
  }
  return grid;
}

}  // namespace minicar
