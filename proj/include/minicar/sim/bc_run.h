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


#ifndef MINICAR_SIM_BC_RUN_H_
#define MINICAR_SIM_BC_RUN_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "minicar/imitation/behavior_cloning.h"
#include "minicar/sim/simulation.h"

namespace minicar {

struct DemoRecordConfig {
  Scene scene;
  VehicleConfig vehicle = VehicleConfig::Default();
  NoiseConfig noise = NoiseConfig::Off();
  FeatureSpec features;
  DemonstratorParams demonstrator;
  int laps = 5;
  double dt = 0.002;
  std::uint64_t seed = 0;
  double max_time = 900.0;  // s of simulated time
};

struct DemoRecordResult {
  std::vector<DatasetRow> rows;
  int laps = 0;
  int collisions = 0;
  double sim_time = 0.0;
};

// Drives the scripted demonstrator around the centerline until `laps` laps
// are done, recording as a session would. `out` receives the JSONL session.
DemoRecordResult RecordDemonstration(const DemoRecordConfig& config, std::ostream* out = nullptr);

struct DriveEvalConfig {
  Scene scene;
  VehicleConfig vehicle = VehicleConfig::Default();
  NoiseConfig noise = NoiseConfig::Off();
  double dt = 0.002;
  int target_laps = 2;
  double max_time = 120.0;
  std::optional<double> throttle_override;
};

struct DriveEvalResult {
  int laps = 0;
  int clean_laps = 0;  // laps finished before the first collision
  int collisions = 0;
  std::string first_collision;
  double sim_time = 0.0;
  double distance = 0.0;  // forward centerline distance

  Json ToJson() const;
};

// Runs the model as the driver from the scene spawn until target_laps, the
// first collision, or max_time.
DriveEvalResult EvaluateDriver(const BcModel& model, const DriveEvalConfig& config,
                               std::ostream* log = nullptr);

}  // namespace minicar

#endif  // MINICAR_SIM_BC_RUN_H_
