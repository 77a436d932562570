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


#ifndef MINICAR_SENSORS_SENSORS_H_
#define MINICAR_SENSORS_SENSORS_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "minicar/core/geometry.h"
#include "minicar/core/json_util.h"
#include "minicar/core/rng.h"
#include "minicar/dynamics/vehicle_model.h"
#include "minicar/world/scene.h"

namespace minicar {

constexpr int kEncoderCpr = 1920;

struct LidarSpec {
  int beams = 360;
  double angular_resolution = kTwoPi / 360.0;  // rad
  double range_min = 0.15;                      // m
  double range_max = 12.0;                      // m
  double rate = 7.0;                            // Hz

  // Throws ConfigError.
  void Validate() const;
};

// Ranges are +infinity for beams without a return.
struct LidarScan {
  double timestamp = 0.0;
  double angle_min = 0.0;  // bearing of beam 0 relative to the sensor heading
  double angle_increment = 0.0;
  std::vector<double> ranges;
};

// Distance along the unit direction `dir` from `origin` to the nearest
// segment, or +infinity.
double RayCast(const std::vector<Segment>& segments, Vec2 origin, Vec2 dir);

// Beam i looks along sensor yaw + i * angular_resolution. When `noise` is
// given, every beam draws one N(0, sigma) sample (hit or not) and the noisy
// range is re-checked against [range_min, range_max].
LidarScan ScanSegments(const std::vector<Segment>& segments, const Pose2& sensor_pose,
                       const LidarSpec& spec, RngStream* noise = nullptr, double sigma = 0.0,
                       double timestamp = 0.0);
LidarScan ScanScene(const Scene& scene, const Pose2& sensor_pose, const LidarSpec& spec,
                    RngStream* noise = nullptr, double sigma = 0.0, double timestamp = 0.0);

// floor(angle / 2pi * cpr), signed.
std::int64_t EncoderRead(double cumulative_angle, int cpr = kEncoderCpr);

Pose2 IpsRead(const VehicleState& state, RngStream* noise = nullptr, double sigma = 0.0);

struct ImuReading {
  double yaw = 0.0;
  double yaw_rate = 0.0;
  double accel_x = 0.0;  // body frame
  double accel_y = 0.0;
};

// Finite differences of the world-frame COM velocity, rotated into the
// current body frame.
ImuReading ImuRead(const VehicleState& prev, const VehicleState& curr, double dt);

struct NoiseConfig {
  double lidar_sigma = 0.025;  // m
  double drive_sigma = 0.013;  // m/s
  double steer_sigma = 0.018;  // rad/s
  double ips_sigma = 0.0;      // m
  std::uint64_t seed = 0;

  static NoiseConfig Off(std::uint64_t seed = 0) { return {0.0, 0.0, 0.0, 0.0, seed}; }
  static NoiseConfig FromJson(const Json& j);
  Json ToJson() const;
  void Validate() const;
};

struct NoisyCommand {
  DriveCommand command;
  ActuatorDisturbance disturbance;
};

// Adds a drive-velocity perturbation (converted to throttle via the top
// speed) and a steering-rate perturbation, then re-clamps. Always draws two
// normals.
NoisyCommand ActuateNoisy(DriveCommand cmd, const NoiseConfig& noise, RngStream& rng,
                          double max_speed);

// One stream per channel so adding a sensor never shifts another's noise.
struct NoiseStreams {
  RngStream lidar;
  RngStream actuator;
  RngStream ips;

  static NoiseStreams FromSeed(std::uint64_t seed);
};

// Emits scan k (k = 0, 1, ...) at the first tick whose time reaches
// (k + 1) / rate, so a window (0, T] holds floor(T * rate) scans.
class LidarScheduler {
 public:
  explicit LidarScheduler(double rate) : rate_(rate) {}
  bool Due(double sim_time);
  void Reset() { next_ = 0; }

 private:
  double rate_;
  std::int64_t next_ = 0;
};

struct SensorFrame {
  double throttle_fb = 0.0;
  double steering_fb = 0.0;
  std::int64_t encoder_left = 0;
  std::int64_t encoder_right = 0;
  Pose2 ips;
  ImuReading imu;
  std::optional<LidarScan> lidar;
  double sim_time = 0.0;
};

Json LidarScanToJson(const LidarScan& scan);
LidarScan LidarScanFromJson(const Json& j);
Json SensorFrameToJson(const SensorFrame& frame);

}  // namespace minicar

#endif  // MINICAR_SENSORS_SENSORS_H_
