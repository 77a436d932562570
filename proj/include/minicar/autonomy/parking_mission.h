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


#ifndef MINICAR_AUTONOMY_PARKING_MISSION_H_
#define MINICAR_AUTONOMY_PARKING_MISSION_H_

#include <array>
#include <deque>
#include <optional>
#include <string>

#include "minicar/autonomy/localization.h"
#include "minicar/autonomy/occupancy_grid.h"
#include "minicar/autonomy/planner.h"
#include "minicar/autonomy/tracker.h"
#include "minicar/core/json_util.h"
#include "minicar/sensors/sensors.h"
#include "minicar/world/scene.h"

namespace minicar {

enum class MissionStage { kMapping, kLocalizing, kPlanning, kTracking, kParked, kFailed };

const char* StageName(MissionStage stage);

struct MissionConfig {
  Pose2 goal;
  double position_tolerance = 0.05;
  double heading_tolerance = 0.1;
  double stage_timeout = 120.0;  // s of simulated time per stage

  // Mapping: one full turn at full left lock, pose from ground truth.
  double mapping_throttle = 0.4;
  double mapping_turn = kTwoPi;
  double grid_resolution = 0.02;
  double stop_speed = 0.01;  // m/s, "stopped" between stages

  // Localization starts from the last mapped pose.
  double init_sigma_xy = 0.1;
  double init_sigma_yaw = 0.1;
  int init_particles = 2000;
  double convergence_std = 0.05;
  int min_localize_updates = 5;

  // The planner aims for a point this far behind the goal; the last stretch
  // is a straight run along the goal heading.
  double lead_in = 0.5;

  PlannerParams planner;
  MclParams mcl;
  TrackerParams tracker;
  double replan_lookahead = 0.5;
  // The live grid starts as a copy of the map with free evidence raised to
  // at least this log-odds, so new obstacles show up after a few hits.
  double live_free_floor = 0.0;

  // Window (s) for the encoder speed estimate.
  double speed_window = 0.04;

  static MissionConfig FromJson(const Json& j);
  Json ToJson() const;
};

// Five-stage parking pipeline driven one sensor frame at a time. Ground
// truth is consulted only while mapping.
class ParkingMission {
 public:
  ParkingMission(const Bounds& bounds, MissionConfig config, double wheel_radius, double dt,
                 std::uint64_t seed);

  DriveCommand Tick(const SensorFrame& frame, const Pose2& ground_truth);

  MissionStage stage() const { return stage_; }
  bool finished() const { return stage_ == MissionStage::kParked || stage_ == MissionStage::kFailed; }
  // True for the tick on which the stage changed.
  bool stage_changed() const { return stage_changed_; }
  bool replanned() const { return replanned_; }
  const std::string& failure() const { return failure_; }
  const Pose2& estimate() const { return estimate_; }
  double speed_estimate() const { return speed_; }
  int replan_count() const { return replans_; }
  const PlannedPath& path() const { return path_; }
  const OccupancyGrid& map() const { return map_; }
  const OccupancyGrid& live_map() const { return live_; }
  const ParticleFilter* filter() const { return filter_ ? &*filter_ : nullptr; }
  const MissionConfig& config() const { return config_; }
  // Simulated seconds spent in each stage, indexed by MissionStage.
  const std::array<double, 6>& stage_times() const { return stage_times_; }

 private:
  void Enter(MissionStage next, double t);
  void Fail(const std::string& why, double t);
  bool Plan(const OccupancyGrid& grid, double t);
  void UpdateOdometry(const SensorFrame& frame);

  MissionConfig config_;
  double wheel_radius_;
  double dt_;
  std::uint64_t seed_;
  MissionStage stage_ = MissionStage::kMapping;
  double stage_start_ = 0.0;
  std::array<double, 6> stage_times_{};
  bool stage_changed_ = false;
  bool replanned_ = false;
  std::string failure_;

  OccupancyGrid map_;
  OccupancyGrid live_;
  std::optional<ParticleFilter> filter_;
  PathTracker tracker_;
  PlannedPath path_;
  int replans_ = 0;
  int localize_updates_ = 0;

  std::optional<SensorFrame> last_frame_;
  Pose2 odom_since_scan_;
  Pose2 estimate_;
  double turned_ = 0.0;
  double speed_ = 0.0;
  std::deque<std::pair<double, double>> distance_log_;  // (t, cumulative distance)
  double travelled_ = 0.0;
};

}  // namespace minicar

#endif  // MINICAR_AUTONOMY_PARKING_MISSION_H_
