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


#include "minicar/sim/bc_run.h"

#include <sstream>

#include "minicar/sim/recorder.h"

namespace minicar {

DemoRecordResult RecordDemonstration(const DemoRecordConfig& config, std::ostream* out) {
  SimulationConfig sc;
  sc.scene = config.scene;
  sc.vehicle = config.vehicle;
  sc.noise = config.noise;
  sc.dt = config.dt;
  Simulation sim(sc);
  Demonstrator demo(config.scene, config.vehicle.geometry.wheelbase,
                    config.vehicle.geometry.max_steer, config.demonstrator, config.seed);
  std::ostringstream sink;
  Recorder recorder(out != nullptr ? *out : sink, config.features, config.vehicle.wheel.radius,
                    config.scene);

  DemoRecordResult result;
  while (recorder.laps() < config.laps && sim.sim_time() < config.max_time) {
    sim.Tick();
    if (sim.events().fault) break;
    if (sim.events().collision_onset) ++result.collisions;
    const Demonstrator::Output cmd = demo.Step(sim.state().pose, config.dt);
    if (auto row = recorder.Observe(sim, cmd.label)) result.rows.push_back(std::move(*row));
    sim.SetCommand(cmd.executed);
    if (out == nullptr) sink.str({});
  }
  recorder.Finish();
  result.laps = recorder.laps();
  result.sim_time = sim.sim_time();
  return result;
}

Json DriveEvalResult::ToJson() const {
  return {{"type", "summary"},        {"laps", laps},         {"clean_laps", clean_laps},
          {"collisions", collisions}, {"first_collision", first_collision},
          {"sim_time", sim_time},     {"distance", distance}};
}

DriveEvalResult EvaluateDriver(const BcModel& model, const DriveEvalConfig& config,
                               std::ostream* log) {
  SimulationConfig sc;
  sc.scene = config.scene;
  sc.vehicle = config.vehicle;
  sc.noise = config.noise;
  sc.dt = config.dt;
  Simulation sim(sc);
  BcDriver driver(model, config.vehicle.wheel.radius);
  driver.SetThrottleOverride(config.throttle_override);
  LapCounter laps(config.scene);

  DriveEvalResult result;
  while (sim.sim_time() < config.max_time) {
    const SensorFrame& frame = sim.Tick();
    if (sim.events().fault) break;
    laps.Update(sim.state().pose.position());
    if (sim.events().collision_onset) {
      if (result.collisions == 0) {
        result.first_collision = sim.events().contact_feature;
        result.clean_laps = laps.laps();
      }
      ++result.collisions;
    }
    const DriveCommand cmd = driver.Step(frame);
    sim.SetCommand(cmd);
    if (log != nullptr) {
      const Pose2& p = sim.state().pose;
      Json rec = {{"t", frame.sim_time},
                  {"truth", {p.x, p.y, p.yaw}},
                  {"cmd", {cmd.throttle, cmd.steering}},
                  {"laps", laps.laps()}};
      if (sim.events().collision_onset) rec["event"] = "collision:" + sim.events().contact_feature;
      *log << rec.dump() << '\n';
    }
    if (result.collisions > 0 || laps.laps() >= config.target_laps) break;
  }
  result.laps = laps.laps();
  if (result.collisions == 0) result.clean_laps = result.laps;
  result.sim_time = sim.sim_time();
  result.distance = laps.distance();
  if (log != nullptr) *log << result.ToJson().dump() << '\n';
  return result;
}

}  // namespace minicar
