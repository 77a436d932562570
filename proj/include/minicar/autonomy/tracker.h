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


#ifndef MINICAR_AUTONOMY_TRACKER_H_
#define MINICAR_AUTONOMY_TRACKER_H_

#include <vector>

#include "minicar/core/geometry.h"
#include "minicar/dynamics/vehicle_model.h"

namespace minicar {

struct TrackerParams {
  double kp_heading = 2.0;
  double kp_speed = 4.0;
  double v_ref = 0.15;      // m/s
  double lookahead = 0.2;   // m
  // Within this distance of the goal the steering blends toward the goal yaw.
  double align_radius = 0.15;
  // Speed target ramps down as kp_approach * remaining distance near the end,
  // but never below min_speed until parked.
  double kp_approach = 1.0;
  double min_speed = 0.04;
  double position_tolerance = 0.05;
  double heading_tolerance = 0.1;
  // Along-track distance to the goal at which the car is stopped.
  double stop_distance = 0.01;
  // Forward speed falls linearly to min_speed as the heading error grows
  // to this value (rad).
  double slow_heading_error = 0.5;
};

struct TrackOutput {
  DriveCommand command;
  bool at_goal = false;
  std::size_t target_index = 0;
};

// Proportional path follower. Remembers progress along the path so the
// nearest-waypoint search only moves forward.
class PathTracker {
 public:
  explicit PathTracker(TrackerParams params = {}) : params_(params) {}

  // Throws std::invalid_argument for an empty path.
  void SetPath(std::vector<Vec2> waypoints, const Pose2& goal);
  bool has_path() const { return !waypoints_.empty(); }
  const std::vector<Vec2>& waypoints() const { return waypoints_; }
  const Pose2& goal() const { return goal_; }
  const TrackerParams& params() const { return params_; }

  TrackOutput Track(const Pose2& pose, double speed);

 private:
  TrackerParams params_;
  std::vector<Vec2> waypoints_;
  Pose2 goal_;
  std::size_t progress_ = 0;
};

// True when `pose` is within both tolerances of `goal`.
bool WithinTolerance(const Pose2& pose, const Pose2& goal, double position_tol, double heading_tol);

}  // namespace minicar

#endif  // MINICAR_AUTONOMY_TRACKER_H_
