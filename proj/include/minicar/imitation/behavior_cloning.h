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


#ifndef MINICAR_IMITATION_BEHAVIOR_CLONING_H_
#define MINICAR_IMITATION_BEHAVIOR_CLONING_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "minicar/core/rng.h"
#include "minicar/dynamics/vehicle_model.h"
#include "minicar/imitation/dataset.h"
#include "minicar/imitation/mlp.h"
#include "minicar/world/scene.h"

namespace minicar {

inline constexpr int kModelFormatVersion = 1;

// A trained driver: featurization, per-feature min-max scaling to [-1, 1],
// and the network. Outputs are (steering, throttle).
struct BcModel {
  FeatureSpec features;
  std::vector<double> feature_min;
  std::vector<double> feature_max;
  Mlp net = Mlp::Zeros({37, 2});
  Json metadata = Json::object();

  Eigen::VectorXd Normalize(const std::vector<double>& f) const;
  DriveCommand Predict(const std::vector<double>& f) const;

  Json ToJson() const;
  static BcModel FromJson(const Json& j);
  void Save(const std::filesystem::path& path) const;
  static BcModel Load(const std::filesystem::path& path);
};

struct BcTrainConfig {
  std::vector<int> hidden = {64, 32, 16};
  TrainParams train;
  int balance_bins = 21;
  bool balance = true;
  bool mirror = true;
};

struct BcTrainResult {
  BcModel model;
  std::vector<double> loss_curve;
  std::size_t rows_used = 0;
};

// Balance, mirror, fit the scaling, then train. Throws std::invalid_argument
// on an empty or ragged dataset.
BcTrainResult TrainBehaviorCloning(const std::vector<DatasetRow>& rows, const FeatureSpec& spec,
                                   const BcTrainConfig& config);

// Deployed model. Between scans, and before the first one, the last command
// is held.
class BcDriver {
 public:
  BcDriver(BcModel model, double wheel_radius);

  DriveCommand Step(const SensorFrame& frame);
  // Replaces the predicted throttle with a fixed value.
  void SetThrottleOverride(std::optional<double> throttle) { throttle_override_ = throttle; }
  void Reset();
  const BcModel& model() const { return model_; }

 private:
  BcModel model_;
  Featurizer featurizer_;
  std::optional<double> throttle_override_;
  DriveCommand last_;
};

// Counts forward trips around a closed centerline.
class LapCounter {
 public:
  explicit LapCounter(const Scene& scene);

  // Returns true on the update that completes a lap.
  bool Update(Vec2 position);
  int laps() const { return laps_; }
  // Net forward distance along the centerline since the first update.
  double distance() const { return distance_; }
  void Reset();

 private:
  Scene scene_;
  double length_;
  std::optional<double> last_progress_;
  double distance_ = 0.0;
  int laps_ = 0;
};

// Point at arc length `s` along the closed centerline.
Vec2 CenterlinePoint(const Scene& scene, double s);

// Scripted stand-in for a human driver: pure pursuit on the centerline from
// the true pose. Labels are the clean pursuit commands; the executed steering
// carries Ornstein-Uhlenbeck wander so the data includes recoveries.
struct DemonstratorParams {
  double lookahead = 0.35;  // m
  double throttle = 0.5;
  double ou_theta = 1.5;  // 1/s
  double ou_sigma = 0.6;  // steering units / sqrt(s)
};

class Demonstrator {
 public:
  Demonstrator(const Scene& scene, double wheelbase, double max_steer, DemonstratorParams params,
               std::uint64_t seed);

  struct Output {
    DriveCommand label;
    DriveCommand executed;
  };
  Output Step(const Pose2& pose, double dt);

 private:
  Scene scene_;
  double wheelbase_;
  double max_steer_;
  DemonstratorParams params_;
  RngStream rng_;
  double wander_ = 0.0;
};

}  // namespace minicar

#endif  // MINICAR_IMITATION_BEHAVIOR_CLONING_H_
