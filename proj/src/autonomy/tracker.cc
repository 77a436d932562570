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


#include "minicar/autonomy/tracker.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace minicar {

namespace {

constexpr std::size_t kSearchWindow = 60;

}  // namespace

bool WithinTolerance(const Pose2& pose, const Pose2& goal, double position_tol,
                     double heading_tol) {
  return Norm(pose.position() - goal.position()) <= position_tol &&
         std::abs(WrapAngle(pose.yaw - goal.yaw)) <= heading_tol;
}

void PathTracker::SetPath(std::vector<Vec2> waypoints, const Pose2& goal) {
  if (waypoints.empty()) throw std::invalid_argument("tracker needs a non-empty path");
  waypoints_ = std::move(waypoints);
  goal_ = goal;
  progress_ = 0;
}

TrackOutput PathTracker::Track(const Pose2& pose, double speed) {
  if (waypoints_.empty()) throw std::invalid_argument("tracker has no path");
  const Vec2 pos = pose.position();
  const std::size_t last = waypoints_.size() - 1;

  double best = std::numeric_limits<double>::infinity();
  const std::size_t window_end = std::min(last, progress_ + kSearchWindow);
  std::size_t nearest = progress_;
  for (std::size_t i = progress_; i <= window_end; ++i) {
    const double d = Norm(waypoints_[i] - pos);
    if (d < best) {
      best = d;
      nearest = i;
    }
  }
  progress_ = nearest;
  std::size_t target = nearest;
  while (target < last && Norm(waypoints_[target] - pos) < params_.lookahead) ++target;

  const Vec2 goal_dir{std::cos(goal_.yaw), std::sin(goal_.yaw)};
  const double to_goal = Norm(goal_.position() - pos);
  const bool final_leg = target == last;

  double remaining;
  Vec2 aim;
  if (final_leg) {
    // Aim at a point on the goal line ahead of the car's projection.
    remaining = Dot(goal_.position() - pos, goal_dir);
    const Vec2 foot = goal_.position() - remaining * goal_dir;
    aim = foot + params_.lookahead * goal_dir;
  } else {
    remaining = Norm(waypoints_[nearest] - pos);
    for (std::size_t i = nearest; i < last; ++i) remaining += Norm(waypoints_[i + 1] - waypoints_[i]);
    aim = waypoints_[target];
  }

  TrackOutput out;
  out.target_index = target;
  if (final_leg && std::abs(remaining) <= params_.stop_distance &&
      WithinTolerance(pose, goal_, params_.position_tolerance, params_.heading_tolerance)) {
    out.at_goal = true;
    return out;
  }

  double magnitude =
      std::clamp(params_.kp_approach * std::abs(remaining), params_.min_speed, params_.v_ref);
  double v_des = remaining >= 0.0 ? magnitude : -magnitude;

  double heading_error;
  if (v_des >= 0.0) {
    heading_error = WrapAngle(std::atan2(aim.y - pos.y, aim.x - pos.x) - pose.yaw);
    if (to_goal < params_.align_radius) {
      const double alpha = 1.0 - to_goal / params_.align_radius;
      heading_error = (1.0 - alpha) * heading_error + alpha * WrapAngle(goal_.yaw - pose.yaw);
    }
  } else {
    // Reversing flips the yaw response to steering.
    heading_error = -WrapAngle(goal_.yaw - pose.yaw);
  }
  if (v_des > 0.0 && params_.slow_heading_error > 0.0) {
    const double f = std::min(1.0, std::abs(heading_error) / params_.slow_heading_error);
    magnitude = magnitude + f * (params_.min_speed - magnitude);
    v_des = std::max(params_.min_speed, magnitude);
  }
  out.command.steering = std::clamp(params_.kp_heading * heading_error, -1.0, 1.0);
  out.command.throttle = std::clamp(params_.kp_speed * (v_des - speed), -1.0, 1.0);
  return out;
}

}  // namespace minicar
