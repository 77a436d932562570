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


#ifndef MINICAR_SIM_PARK_H_
#define MINICAR_SIM_PARK_H_

#include <optional>
#include <ostream>
#include <string>

#include "minicar/autonomy/parking_mission.h"
#include "minicar/sim/simulation.h"

namespace minicar {

struct ParkRunConfig {
  Scene scene;
  VehicleConfig vehicle = VehicleConfig::Default();
  NoiseConfig noise = NoiseConfig::Off();
  // Wall and obstacle perturbation applied to the live world before the run.
  std::optional<PerturbationSigmas> perturbation;
  // Box spawned into the live world once mapping ends (center pose, extents).
  std::optional<std::pair<Pose2, Vec2>> unmapped_obstacle;
  MissionConfig mission;
  double dt = 0.002;
  std::uint64_t seed = 0;
  // Simulated time allowed for the vehicle to come to rest after parking.
  double settle_time = 2.0;
};

// Defaults for the bundled Parking School scene: goal, and the box that
// appears on the way there after mapping.
ParkRunConfig ParkingSchoolRun(const Scene& scene, std::uint64_t seed, bool nominal_noise);

struct ParkRunResult {
  bool parked = false;   // mission reached PARKED
  bool success = false;  // parked, ground truth within tolerance, no collisions
  std::string failure;
  double position_error = 0.0;  // ground truth vs goal, after settling
  double heading_error = 0.0;
  double estimate_error = 0.0;  // ground truth vs mission estimate
  int replans = 0;
  int collisions = 0;
  double sim_time = 0.0;
  std::array<double, 6> stage_times{};
  std::vector<std::string> warnings;
  // Static map built during mapping.
  std::optional<OccupancyGrid> map;

  Json ToJson() const;
};

// Runs the mission headless. When `log` is given, writes one JSON line per
// tick followed by a summary line.
ParkRunResult RunParkingMission(const ParkRunConfig& config, std::ostream* log = nullptr);

}  // namespace minicar

#endif  // MINICAR_SIM_PARK_H_
