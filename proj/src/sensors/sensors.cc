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


#include "minicar/sensors/sensors.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "minicar/core/error.h"

namespace minicar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSegmentTolerance = 1e-12;

}  // namespace

void LidarSpec::Validate() const {
  if (beams <= 0) throw ConfigError("lidar.beams: must be positive");
  if (std::abs(beams * angular_resolution - kTwoPi) > 1e-9) {
    throw ConfigError("lidar: beams * angular_resolution must cover 360 degrees");
  }
  if (!(range_min >= 0.0 && range_min < range_max)) {
    throw ConfigError("lidar: need 0 <= range_min < range_max");
  }
  if (!(rate > 0.0)) throw ConfigError("lidar.rate: must be positive");
}

double RayCast(const std::vector<Segment>& segments, Vec2 origin, Vec2 dir) {
  double best = kInf;
  for (const Segment& seg : segments) {
    const Vec2 e = seg.b - seg.a;
    const double denom = Cross(dir, e);
    if (denom == 0.0) continue;
    const Vec2 ao = seg.a - origin;
    const double t = Cross(ao, e) / denom;
    const double u = Cross(ao, dir) / denom;
    if (t >= 0.0 && u >= -kSegmentTolerance && u <= 1.0 + kSegmentTolerance) {
      best = std::min(best, t);
    }
  }
  return best;
}

LidarScan ScanSegments(const std::vector<Segment>& segments, const Pose2& sensor_pose,
                       const LidarSpec& spec, RngStream* noise, double sigma, double timestamp) {
  LidarScan scan;
  scan.timestamp = timestamp;
  scan.angle_min = 0.0;
  scan.angle_increment = spec.angular_resolution;
  scan.ranges.resize(static_cast<std::size_t>(spec.beams));
  const Vec2 origin = sensor_pose.position();
  for (int i = 0; i < spec.beams; ++i) {
    const double bearing = sensor_pose.yaw + i * spec.angular_resolution;
    double r = RayCast(segments, origin, {std::cos(bearing), std::sin(bearing)});
    if (noise != nullptr) r += noise->Normal(0.0, sigma);
    if (!(r >= spec.range_min && r <= spec.range_max)) r = kInf;
    scan.ranges[static_cast<std::size_t>(i)] = r;
  }
  return scan;
}

LidarScan ScanScene(const Scene& scene, const Pose2& sensor_pose, const LidarSpec& spec,
                    RngStream* noise, double sigma, double timestamp) {
  return ScanSegments(SceneSegments(scene), sensor_pose, spec, noise, sigma, timestamp);
}

std::int64_t EncoderRead(double cumulative_angle, int cpr) {
  if (cpr <= 0) throw std::invalid_argument("cpr must be positive");
  return static_cast<std::int64_t>(std::floor(cumulative_angle / kTwoPi * cpr));
}

Pose2 IpsRead(const VehicleState& state, RngStream* noise, double sigma) {
  Pose2 p = state.pose;
  if (noise != nullptr) {
    p.x += noise->Normal(0.0, sigma);
    p.y += noise->Normal(0.0, sigma);
  }
  return p;
}

ImuReading ImuRead(const VehicleState& prev, const VehicleState& curr, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("imu dt must be positive");
  const Vec2 v_prev = Rotate({prev.v_x, prev.v_y}, prev.pose.yaw);
  const Vec2 v_curr = Rotate({curr.v_x, curr.v_y}, curr.pose.yaw);
  const Vec2 a_body = Rotate((1.0 / dt) * (v_curr - v_prev), -curr.pose.yaw);
  return {curr.pose.yaw, WrapAngle(curr.pose.yaw - prev.pose.yaw) / dt, a_body.x, a_body.y};
}

NoiseConfig NoiseConfig::FromJson(const Json& j) {
  if (!j.is_object()) throw ConfigError("noise: expected an object");
  NoiseConfig n;
  n.lidar_sigma = NumberOr(j, "lidar_sigma", n.lidar_sigma, "noise");
  n.drive_sigma = NumberOr(j, "drive_sigma", n.drive_sigma, "noise");
  n.steer_sigma = NumberOr(j, "steer_sigma", n.steer_sigma, "noise");
  n.ips_sigma = NumberOr(j, "ips_sigma", n.ips_sigma, "noise");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer()) throw ConfigError("noise.seed: expected an integer");
    n.seed = j["seed"].get<std::uint64_t>();
  }
  n.Validate();
  return n;
}

Json NoiseConfig::ToJson() const {
  return {{"lidar_sigma", lidar_sigma}, {"drive_sigma", drive_sigma},
          {"steer_sigma", steer_sigma}, {"ips_sigma", ips_sigma}, {"seed", seed}};
}

void NoiseConfig::Validate() const {
  if (!(lidar_sigma >= 0.0)) throw ConfigError("noise.lidar_sigma: must be >= 0");
  if (!(drive_sigma >= 0.0)) throw ConfigError("noise.drive_sigma: must be >= 0");
  if (!(steer_sigma >= 0.0)) throw ConfigError("noise.steer_sigma: must be >= 0");
  if (!(ips_sigma >= 0.0)) throw ConfigError("noise.ips_sigma: must be >= 0");
}

NoisyCommand ActuateNoisy(DriveCommand cmd, const NoiseConfig& noise, RngStream& rng,
                          double max_speed) {
  const double n_drive = rng.Normal(0.0, noise.drive_sigma);
  const double n_steer = rng.Normal(0.0, noise.steer_sigma);
  NoisyCommand out;
  out.command.throttle = std::clamp(cmd.throttle + n_drive / max_speed, -1.0, 1.0);
  out.command.steering = std::clamp(cmd.steering, -1.0, 1.0);
  out.disturbance.steer_rate = n_steer;
  return out;
}

NoiseStreams NoiseStreams::FromSeed(std::uint64_t seed) {
  return {RngStream::ForChannel(seed, "lidar"), RngStream::ForChannel(seed, "actuator"),
          RngStream::ForChannel(seed, "ips")};
}

bool LidarScheduler::Due(double sim_time) {
  if (sim_time + 1e-9 >= static_cast<double>(next_ + 1) / rate_) {
    ++next_;
    return true;
  }
  return false;
}

Json LidarScanToJson(const LidarScan& scan) {
  Json ranges = Json::array();
  for (double r : scan.ranges) ranges.push_back(std::isfinite(r) ? Json(r) : Json(nullptr));
  return {{"t", scan.timestamp},
          {"angle_min", scan.angle_min},
          {"angle_increment", scan.angle_increment},
          {"ranges", ranges}};
}

LidarScan LidarScanFromJson(const Json& j) {
  if (!j.is_object()) throw ParseError("lidar: expected an object");
  LidarScan scan;
  scan.timestamp = RequireNumber(j, "t", "lidar");
  scan.angle_min = RequireNumber(j, "angle_min", "lidar");
  scan.angle_increment = RequireNumber(j, "angle_increment", "lidar");
  RequireArray(j, "ranges", "lidar");
  for (const Json& r : j["ranges"]) {
    if (r.is_null()) {
      scan.ranges.push_back(kInf);
    } else if (r.is_number()) {
      scan.ranges.push_back(r.get<double>());
    } else {
      throw ParseError("lidar.ranges: expected numbers or null");
    }
  }
  return scan;
}

Json SensorFrameToJson(const SensorFrame& f) {
  return {{"throttle_fb", f.throttle_fb},
          {"steering_fb", f.steering_fb},
          {"encoders", {f.encoder_left, f.encoder_right}},
          {"ips", {f.ips.x, f.ips.y, f.ips.yaw}},
          {"imu",
           {{"yaw", f.imu.yaw},
            {"yaw_rate", f.imu.yaw_rate},
            {"accel", {f.imu.accel_x, f.imu.accel_y}}}},
          {"lidar", f.lidar ? LidarScanToJson(*f.lidar) : Json(nullptr)},
          {"t", f.sim_time}};
}

}  // namespace minicar
