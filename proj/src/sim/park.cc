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


#include "minicar/sim/park.h"

#include <cmath>

namespace minicar {

ParkRunConfig ParkingSchoolRun(const Scene& scene, std::uint64_t seed, bool nominal_noise) {
  ParkRunConfig c;
  c.scene = scene;
  c.seed = seed;
  c.noise = nominal_noise ? NoiseConfig{} : NoiseConfig::Off();
  c.noise.seed = seed;
  if (nominal_noise) {
    c.perturbation = PerturbationSigmas{};
    c.unmapped_obstacle = {{{1.35, 0.72, 0.0}, {0.2, 0.2}}};
  }
  c.mission.goal = {2.3, 0.75, 0.0};
  return c;
}

Json ParkRunResult::ToJson() const {
  Json times = Json::object();
  for (int s = 0; s < 5; ++s) times[StageName(static_cast<MissionStage>(s))] = stage_times[s];
  return {{"type", "summary"},
          {"verdict", success ? "PARKED" : "FAILED"},
          {"parked", parked},
          {"failure", failure},
          {"position_error", position_error},
          {"heading_error", heading_error},
          {"estimate_error", estimate_error},
          {"replans", replans},
          {"collisions", collisions},
          {"sim_time", sim_time},
          {"stage_times", times},
          {"warnings", warnings}};
}

ParkRunResult RunParkingMission(const ParkRunConfig& config, std::ostream* log) {
  ParkRunResult result;
  Scene live = config.scene;
  if (config.perturbation) {
    live = PerturbScene(live, *config.perturbation, config.seed, &result.warnings);
  }
  SimulationConfig sc;
  sc.scene = live;
  sc.vehicle = config.vehicle;
  sc.noise = config.noise;
  sc.dt = config.dt;
  Simulation sim(sc);
  MissionConfig mc = config.mission;
  mc.tracker.position_tolerance = mc.position_tolerance;
  mc.tracker.heading_tolerance = mc.heading_tolerance;
  ParkingMission mission(config.scene.bounds, mc, config.vehicle.wheel.radius, config.dt,
                         config.seed);

  double settle_start = -1.0;
  while (true) {
    const SensorFrame& frame = sim.Tick();
    const TickEvents ev = sim.events();
    if (ev.fault) {
      result.failure = "integration fault: " + ev.fault_detail;
      break;
    }
    const MissionStage before = mission.stage();
    const DriveCommand cmd = mission.Tick(frame, sim.state().pose);
    sim.SetCommand(cmd);
    if (before == MissionStage::kMapping && mission.stage() != MissionStage::kMapping &&
        config.unmapped_obstacle) {
      sim.SetScene(SpawnUnmappedObstacle(sim.scene(), config.unmapped_obstacle->first,
                                         config.unmapped_obstacle->second));
    }
    if (log != nullptr) {
      const Pose2& est = mission.estimate();
      const Pose2& gt = sim.state().pose;
      Json rec = {{"t", frame.sim_time},
                  {"stage", StageName(mission.stage())},
                  {"estimate", {est.x, est.y, est.yaw}},
                  {"truth", {gt.x, gt.y, gt.yaw}},
                  {"cmd", {cmd.throttle, cmd.steering}}};
      Json events = Json::array();
      if (mission.stage_changed()) events.push_back("stage");
      if (mission.replanned()) events.push_back("replan");
      if (ev.collision_onset) events.push_back("collision:" + ev.contact_feature);
      if (!events.empty()) rec["events"] = events;
      if (mission.stage_changed() && mission.stage() == MissionStage::kTracking) {
        Json path = Json::array();
        for (const Vec2& w : mission.path().waypoints) path.push_back({w.x, w.y});
        rec["path"] = path;
      }
      *log << rec.dump() << '\n';
    }
    if (mission.stage() == MissionStage::kFailed) {
      result.failure = mission.failure();
      break;
    }
    if (mission.stage() == MissionStage::kParked) {
      if (settle_start < 0.0) settle_start = frame.sim_time;
      const bool stopped = std::hypot(sim.state().v_x, sim.state().v_y) < 1e-3;
      if (stopped || frame.sim_time - settle_start >= config.settle_time) {
        result.parked = true;
        break;
      }
    }
  }

  const Pose2& gt = sim.state().pose;
  const Pose2& goal = config.mission.goal;
  result.position_error = Norm(gt.position() - goal.position());
  result.heading_error = std::abs(WrapAngle(gt.yaw - goal.yaw));
  result.estimate_error = Norm(gt.position() - mission.estimate().position());
  result.replans = mission.replan_count();
  result.collisions = sim.collision_count();
  result.sim_time = sim.sim_time();
  result.stage_times = mission.stage_times();
  result.map = mission.map();
  result.success = result.parked && result.collisions == 0 &&
                   result.position_error <= config.mission.position_tolerance &&
                   result.heading_error <= config.mission.heading_tolerance;
  if (result.parked && !result.success && result.failure.empty()) {
    result.failure = result.collisions > 0 ? "collision during mission"
                                           : "parked outside tolerance (ground truth)";
  }
  if (log != nullptr) *log << result.ToJson().dump() << '\n';
  return result;
}

}  // namespace minicar
