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


#ifndef MINICAR_SIM_SIMULATION_H_
#define MINICAR_SIM_SIMULATION_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "minicar/dynamics/vehicle_config.h"
#include "minicar/dynamics/vehicle_model.h"
#include "minicar/sensors/sensors.h"
#include "minicar/world/collision.h"
#include "minicar/world/scene.h"

namespace minicar {

struct SimulationConfig {
  Scene scene;
  VehicleConfig vehicle = VehicleConfig::Default();
  NoiseConfig noise = NoiseConfig::Off();
  LidarSpec lidar;
  double dt = 0.002;
};

struct TickEvents {
  bool collision_onset = false;
  std::string contact_feature;
  bool lidar = false;
  bool fault = false;
  std::string fault_detail;
};

// Owns the vehicle and the live scene and advances them in fixed steps:
//   1. the buffered command, perturbed by actuator noise
//   2. dynamics
//   3. sensor frame (LIDAR on its own cadence)
//   4. collision check, reported on contact onset only
// Mode logic (autonomy, imitation) runs after Tick() and feeds the next
// command through SetCommand().
class Simulation {
 public:
  explicit Simulation(SimulationConfig config);

  // Clamps to [-1, 1]. Returns true when clamping changed the values. The
  // latest call before a tick wins.
  bool SetCommand(DriveCommand cmd);
  const DriveCommand& pending_command() const { return pending_; }

  const SensorFrame& Tick();

  // Back to `pose` (default: scene spawn) at time zero with fresh noise
  // streams. Clears faults and contact state.
  void Reset(std::optional<Pose2> pose = std::nullopt);

  // Swaps the live scene without touching the vehicle.
  void SetScene(Scene scene);

  const SimulationConfig& config() const { return config_; }
  const Scene& scene() const { return config_.scene; }
  const VehicleState& state() const { return state_; }
  const SensorFrame& frame() const { return frame_; }
  const TickEvents& events() const { return events_; }
  double sim_time() const { return static_cast<double>(ticks_) * config_.dt; }
  std::int64_t ticks() const { return ticks_; }
  bool in_contact() const { return in_contact_; }
  int collision_count() const { return collision_count_; }
  bool faulted() const { return faulted_; }

  // Sensor frame plus ground truth under "truth".
  Json TelemetryJson() const;

 private:
  void BuildFrame(const VehicleState& prev, bool with_lidar);

  SimulationConfig config_;
  std::vector<Segment> segments_;
  VehicleState state_;
  SensorFrame frame_;
  TickEvents events_;
  DriveCommand pending_;
  NoiseStreams streams_;
  LidarScheduler scheduler_;
  std::int64_t ticks_ = 0;
  bool in_contact_ = false;
  int collision_count_ = 0;
  bool faulted_ = false;
};

}  // namespace minicar

#endif  // MINICAR_SIM_SIMULATION_H_
