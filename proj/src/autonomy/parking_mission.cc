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


#include "minicar/autonomy/parking_mission.h"

#include <cmath>

#include "minicar/core/error.h"

namespace minicar {

const char* StageName(MissionStage stage) {
  switch (stage) {
    case MissionStage::kMapping:
      return "MAPPING";
    case MissionStage::kLocalizing:
      return "LOCALIZING";
    case MissionStage::kPlanning:
      return "PLANNING";
    case MissionStage::kTracking:
      return "TRACKING";
    case MissionStage::kParked:
      return "PARKED";
    case MissionStage::kFailed:
      return "FAILED";
  }
  return "?";
}

MissionConfig MissionConfig::FromJson(const Json& j) {
  if (!j.is_object()) throw ConfigError("mission: expected an object");
  MissionConfig c;
  if (j.contains("goal")) {
    const Json& g = j["goal"];
    if (!g.is_array() || g.size() != 3 || !g[0].is_number() || !g[1].is_number() ||
        !g[2].is_number()) {
      throw ConfigError("mission.goal: expected [x, y, yaw]");
    }
    c.goal = {g[0].get<double>(), g[1].get<double>(), g[2].get<double>()};
  }
  c.position_tolerance = NumberOr(j, "position_tolerance", c.position_tolerance, "mission");
  c.heading_tolerance = NumberOr(j, "heading_tolerance", c.heading_tolerance, "mission");
  c.stage_timeout = NumberOr(j, "stage_timeout", c.stage_timeout, "mission");
  c.lead_in = NumberOr(j, "lead_in", c.lead_in, "mission");
  c.planner.inflation_radius =
      NumberOr(j, "inflation_radius", c.planner.inflation_radius, "mission");
  c.planner.occupied_threshold =
      NumberOr(j, "occupied_threshold", c.planner.occupied_threshold, "mission");
  c.tracker.kp_heading = NumberOr(j, "kp_heading", c.tracker.kp_heading, "mission");
  c.tracker.kp_speed = NumberOr(j, "kp_speed", c.tracker.kp_speed, "mission");
  c.tracker.v_ref = NumberOr(j, "v_ref", c.tracker.v_ref, "mission");
  c.tracker.lookahead = NumberOr(j, "lookahead", c.tracker.lookahead, "mission");
  c.replan_lookahead = NumberOr(j, "replan_lookahead", c.replan_lookahead, "mission");
  c.live_free_floor = NumberOr(j, "live_free_floor", c.live_free_floor, "mission");
  c.tracker.position_tolerance = c.position_tolerance;
  c.tracker.heading_tolerance = c.heading_tolerance;
  if (!(c.stage_timeout > 0.0)) throw ConfigError("mission.stage_timeout: must be positive");
  if (!(c.position_tolerance > 0.0 && c.heading_tolerance > 0.0)) {
    throw ConfigError("mission: tolerances must be positive");
  }
  return c;
}

Json MissionConfig::ToJson() const {
  return {{"goal", {goal.x, goal.y, goal.yaw}},
          {"position_tolerance", position_tolerance},
          {"heading_tolerance", heading_tolerance},
          {"stage_timeout", stage_timeout},
          {"lead_in", lead_in},
          {"inflation_radius", planner.inflation_radius},
          {"occupied_threshold", planner.occupied_threshold},
          {"kp_heading", tracker.kp_heading},
          {"kp_speed", tracker.kp_speed},
          {"v_ref", tracker.v_ref},
          {"lookahead", tracker.lookahead},
          {"replan_lookahead", replan_lookahead},
          {"live_free_floor", live_free_floor}};
}

ParkingMission::ParkingMission(const Bounds& bounds, MissionConfig config, double wheel_radius,
                               double dt, std::uint64_t seed)
    : config_(std::move(config)),
      wheel_radius_(wheel_radius),
      dt_(dt),
      seed_(seed),
      map_(OccupancyGrid::ForBounds(bounds, config_.grid_resolution)),
      tracker_(config_.tracker) {}

void ParkingMission::Enter(MissionStage next, double t) {
  stage_times_[static_cast<int>(stage_)] += t - stage_start_;
  stage_ = next;
  stage_start_ = t;
  stage_changed_ = true;
}

void ParkingMission::Fail(const std::string& why, double t) {
  failure_ = std::string(StageName(stage_)) + ": " + why;
  Enter(MissionStage::kFailed, t);
}

void ParkingMission::UpdateOdometry(const SensorFrame& frame) {
  if (last_frame_) {
    const Pose2 delta = OdometryUpdate(*last_frame_, frame, wheel_radius_);
    odom_since_scan_ = ComposePose(odom_since_scan_, delta);
    estimate_ = ComposePose(estimate_, delta);
    turned_ += delta.yaw;
    travelled_ += delta.x;
  }
  last_frame_ = frame;
  distance_log_.emplace_back(frame.sim_time, travelled_);
  while (distance_log_.size() > 1 &&
         distance_log_.front().first < frame.sim_time - config_.speed_window - 1e-9) {
    distance_log_.pop_front();
  }
  const auto& [t0, d0] = distance_log_.front();
  speed_ = frame.sim_time > t0 ? (travelled_ - d0) / (frame.sim_time - t0) : 0.0;
}

bool ParkingMission::Plan(const OccupancyGrid& grid, double t) {
  const BlockedGrid blocked =
      InflateGrid(grid, config_.planner.inflation_radius, config_.planner.occupied_threshold);
  const Pose2& goal = config_.goal;
  const Vec2 dir{std::cos(goal.yaw), std::sin(goal.yaw)};
  const Vec2 pre_goal = goal.position() - config_.lead_in * dir;
  std::vector<Vec2> lead;
  const int n = std::max(1, static_cast<int>(std::ceil(config_.lead_in / grid.resolution())));
  for (int i = 0; i <= n; ++i) {
    const Vec2 p = pre_goal + (config_.lead_in * i / n) * dir;
    if (!blocked.Free(grid.CellOf(p))) {
      Fail("goal approach blocked near (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")",
           t);
      return false;
    }
    lead.push_back(p);
  }
  try {
    const GridIndex start = NearestFreeCell(blocked, grid.CellOf(estimate_.position()), 15);
    const GridSearchResult r = AStarSearch(blocked, start, grid.CellOf(pre_goal));
    if (!r.found) {
      Fail("goal unreachable", t);
      return false;
    }
    path_ = {};
    path_.cells = r.cells;
    for (const GridIndex& c : r.cells) path_.waypoints.push_back(grid.CellCenter(c));
    for (std::size_t i = 1; i < lead.size(); ++i) path_.waypoints.push_back(lead[i]);
    path_.goal = goal;
    path_.cost = r.cost() * grid.resolution() + config_.lead_in;
  } catch (const PlanningError& e) {
    Fail(e.what(), t);
    return false;
  }
  tracker_.SetPath(path_.waypoints, goal);
  return true;
}

DriveCommand ParkingMission::Tick(const SensorFrame& frame, const Pose2& ground_truth) {
  stage_changed_ = false;
  replanned_ = false;
  const double t = frame.sim_time;
  if (finished()) return {};
  UpdateOdometry(frame);
  if (t - stage_start_ > config_.stage_timeout) {
    Fail("timed out after " + std::to_string(config_.stage_timeout) + " s", t);
    return {};
  }

  switch (stage_) {
    case MissionStage::kMapping: {
      estimate_ = ground_truth;
      if (frame.lidar) map_.Insert(ground_truth, *frame.lidar);
      if (turned_ < config_.mapping_turn) return {config_.mapping_throttle, 1.0};
      if (std::abs(speed_) > config_.stop_speed) return {};
      live_ = map_;
      for (int y = 0; y < live_.height(); ++y) {
        for (int x = 0; x < live_.width(); ++x) {
          const GridIndex c{x, y};
          if (live_.LogOdds(c) < config_.live_free_floor) {
            live_.SetLogOdds(c, config_.live_free_floor);
          }
        }
      }
      filter_.emplace(map_, config_.mcl, RngStream::ForChannel(seed_, "mcl"));
      filter_->InitializeGaussian(estimate_, config_.init_sigma_xy, config_.init_sigma_yaw,
                                  config_.init_particles);
      odom_since_scan_ = {};
      Enter(MissionStage::kLocalizing, t);
      return {};
    }
    case MissionStage::kLocalizing: {
      if (frame.lidar) {
        filter_->Update(odom_since_scan_, &*frame.lidar);
        odom_since_scan_ = {};
        estimate_ = filter_->Estimate();
        ++localize_updates_;
        if (localize_updates_ >= config_.min_localize_updates &&
            filter_->PositionStd() < config_.convergence_std) {
          live_.Insert(estimate_, *frame.lidar);
          Enter(MissionStage::kPlanning, t);
        }
      }
      return {};
    }
    case MissionStage::kPlanning: {
      if (Plan(live_, t)) Enter(MissionStage::kTracking, t);
      return {};
    }
    case MissionStage::kTracking: {
      if (frame.lidar) {
        filter_->Update(odom_since_scan_, &*frame.lidar);
        odom_since_scan_ = {};
        estimate_ = filter_->Estimate();
        live_.Insert(estimate_, *frame.lidar);
        const ReplanParams rp{config_.replan_lookahead, config_.planner.occupied_threshold,
                              config_.planner.inflation_radius - config_.grid_resolution};
        if (ReplanNeeded(live_, path_, estimate_, rp)) {
          ++replans_;
          replanned_ = true;
          Enter(MissionStage::kPlanning, t);
          if (!Plan(live_, t)) return {};
          Enter(MissionStage::kTracking, t);
        }
      }
      const TrackOutput out = tracker_.Track(estimate_, speed_);
      if (out.at_goal) {
        Enter(MissionStage::kParked, t);
        return {};
      }
      return out.command;
    }
    case MissionStage::kParked:
    case MissionStage::kFailed:
      break;
  }
  return {};
}

}  // namespace minicar
