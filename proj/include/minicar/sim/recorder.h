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


#ifndef MINICAR_SIM_RECORDER_H_
#define MINICAR_SIM_RECORDER_H_

#include <optional>
#include <ostream>

#include "minicar/imitation/behavior_cloning.h"
#include "minicar/imitation/dataset.h"
#include "minicar/sim/simulation.h"

namespace minicar {

// Session recording as JSONL: one telemetry record per tick and one dataset
// row per LIDAR frame, labelled with the command issued in response to it.
// Finish() appends a summary record. Lines are written whole.
class Recorder {
 public:
  // `scene` enables lap counting when it has a centerline.
  Recorder(std::ostream& out, FeatureSpec spec, double wheel_radius, const Scene& scene);

  // Call once per tick after the command for that tick is known. Returns the
  // row when one was written.
  std::optional<DatasetRow> Observe(const Simulation& sim, const DriveCommand& label);
  void Finish();

  std::size_t rows() const { return rows_; }
  std::size_t telemetry_records() const { return telemetry_; }
  int laps() const { return laps_ ? laps_->laps() : 0; }
  bool finished() const { return finished_; }
  // False once a write has failed; nothing further is written.
  bool ok() const { return ok_; }

 private:
  void Write(const Json& j);

  std::ostream* out_;
  Featurizer featurizer_;
  std::optional<LapCounter> laps_;
  std::size_t rows_ = 0;
  std::size_t telemetry_ = 0;
  double dt_ = 0.0;
  bool finished_ = false;
  bool ok_ = true;
};

}  // namespace minicar

#endif  // MINICAR_SIM_RECORDER_H_
