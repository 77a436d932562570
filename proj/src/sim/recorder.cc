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


#include "minicar/sim/recorder.h"

#include <algorithm>
#include <string>

namespace minicar {

Recorder::Recorder(std::ostream& out, FeatureSpec spec, double wheel_radius, const Scene& scene)
    : out_(&out), featurizer_(spec, wheel_radius) {
  if (scene.centerline.size() >= 2) laps_.emplace(scene);
}

void Recorder::Write(const Json& j) {
  if (!ok_) return;
  // Serialize first so a failure never leaves half a line.
  const std::string line = j.dump() + '\n';
  out_->write(line.data(), static_cast<std::streamsize>(line.size()));
  if (!*out_) ok_ = false;
}

std::optional<DatasetRow> Recorder::Observe(const Simulation& sim, const DriveCommand& label) {
  if (finished_) return std::nullopt;
  const SensorFrame& frame = sim.frame();
  dt_ = sim.config().dt;
  if (laps_) laps_->Update(sim.state().pose.position());

  Json telemetry = sim.TelemetryJson();
  telemetry["type"] = "telemetry";
  Write(telemetry);
  ++telemetry_;

  const auto features = featurizer_.Observe(frame);
  if (!features) return std::nullopt;
  DatasetRow row;
  row.features = *features;
  row.steering = std::clamp(label.steering, -1.0, 1.0);
  row.throttle = std::clamp(label.throttle, -1.0, 1.0);
  row.t = frame.sim_time;
  row.lap_id = laps();
  Write(row.ToJson());
  ++rows_;
  return row;
}

void Recorder::Finish() {
  if (finished_) return;
  finished_ = true;
  Write({{"type", "summary"},
         {"rows", rows_},
         {"telemetry", telemetry_},
         {"duration", static_cast<double>(telemetry_) * dt_},
         {"laps", laps()}});
  out_->flush();
}

}  // namespace minicar
