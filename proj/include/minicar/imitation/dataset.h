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


#ifndef MINICAR_IMITATION_DATASET_H_
#define MINICAR_IMITATION_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "minicar/core/json_util.h"
#include "minicar/sensors/sensors.h"

namespace minicar {

inline constexpr int kDatasetFormatVersion = 1;

// Fixed percept: `beams` LIDAR ranges sampled at equal bearing steps starting
// straight ahead, divided by range_max (no-return reads as 1), followed by
// forward speed over max_speed.
struct FeatureSpec {
  int beams = 36;
  double range_max = 12.0;
  double max_speed = 0.26;

  int size() const { return beams + 1; }
  void Validate() const;
  Json ToJson() const;
  static FeatureSpec FromJson(const Json& j);
  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

std::vector<double> Featurize(const LidarScan& scan, double speed, const FeatureSpec& spec);

// Tracks encoder counts across frames and featurizes each frame that carries
// a scan. Speed is the mean rear-wheel travel since the previous scan.
class Featurizer {
 public:
  Featurizer(FeatureSpec spec, double wheel_radius, int cpr = kEncoderCpr);

  // Returns features for frames with a scan, nullopt otherwise.
  std::optional<std::vector<double>> Observe(const SensorFrame& frame);
  void Reset();
  const FeatureSpec& spec() const { return spec_; }
  double speed() const { return speed_; }

 private:
  FeatureSpec spec_;
  double wheel_radius_;
  int cpr_;
  std::optional<SensorFrame> last_scan_frame_;
  double speed_ = 0.0;
};

struct DatasetRow {
  std::vector<double> features;
  double steering = 0.0;
  double throttle = 0.0;
  double t = 0.0;
  int lap_id = 0;

  Json ToJson() const;
  static DatasetRow FromJson(const Json& j);
  friend bool operator==(const DatasetRow&, const DatasetRow&) = default;
};

// Rows whose steering label falls in an over-full histogram bin are
// subsampled (seeded) down to twice the median non-empty bin count. Input
// order is kept among the survivors. Throws std::invalid_argument on empty
// input.
std::vector<DatasetRow> BalanceDataset(const std::vector<DatasetRow>& rows, int bins,
                                       std::uint64_t seed);

// Appends a mirrored copy of every row: beams reflected about the forward
// axis, steering negated.
std::vector<DatasetRow> AugmentMirror(const std::vector<DatasetRow>& rows);
DatasetRow MirrorRow(const DatasetRow& row, int beams);

// JSONL. Lines with "type" other than "row" (telemetry, summaries) are
// skipped on load, so a session recording can be read directly.
void SaveDataset(const std::filesystem::path& path, const std::vector<DatasetRow>& rows);
std::vector<DatasetRow> LoadDataset(const std::filesystem::path& path);

}  // namespace minicar

#endif  // MINICAR_IMITATION_DATASET_H_
