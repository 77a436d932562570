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


#include "minicar/sim/simulation.h"

#include <algorithm>

#include "minicar/core/error.h"

namespace minicar {

Simulation::Simulation(SimulationConfig config)
    : config_(std::move(config)), scheduler_(config_.lidar.rate) {
  if (!(config_.dt > 0.0 && config_.dt <= 0.01)) {
    throw ConfigError("dt: must be in (0, 0.01]");
  }
  config_.lidar.Validate();
  config_.noise.Validate();
  config_.vehicle.Validate();
  segments_ = SceneSegments(config_.scene);
  Reset();
}

bool Simulation::SetCommand(DriveCommand cmd) {
  const DriveCommand clamped{std::clamp(cmd.throttle, -1.0, 1.0),
                             std::clamp(cmd.steering, -1.0, 1.0)};
  pending_ = clamped;
  return clamped.throttle != cmd.throttle || clamped.steering != cmd.steering;
}

void Simulation::Reset(std::optional<Pose2> pose) {
  state_ = SettledState(config_.vehicle, pose.value_or(config_.scene.spawn));
  streams_ = NoiseStreams::FromSeed(config_.noise.seed);
  scheduler_.Reset();
  pending_ = {};
  ticks_ = 0;
  in_contact_ = Collide({state_.pose, config_.vehicle.body_length, config_.vehicle.body_width},
                        config_.scene)
                    .contact;
  collision_count_ = 0;
  faulted_ = false;
  events_ = {};
  BuildFrame(state_, false);
}

void Simulation::SetScene(Scene scene) {
  config_.scene = std::move(scene);
  segments_ = SceneSegments(config_.scene);
}

void Simulation::BuildFrame(const VehicleState& prev, bool with_lidar) {
  frame_.throttle_fb = state_.command.throttle;
  frame_.steering_fb = state_.command.steering;
  frame_.encoder_left = EncoderRead(state_.wheels[kRearLeft].cumulative_angle);
  frame_.encoder_right = EncoderRead(state_.wheels[kRearRight].cumulative_angle);
  frame_.ips = config_.noise.ips_sigma > 0.0
                   ? IpsRead(state_, &streams_.ips, config_.noise.ips_sigma)
                   : IpsRead(state_);
  frame_.imu = ticks_ > 0 ? ImuRead(prev, state_, config_.dt) : ImuReading{state_.pose.yaw};
  frame_.sim_time = sim_time();
  if (with_lidar) {
    RngStream* noise = config_.noise.lidar_sigma > 0.0 ? &streams_.lidar : nullptr;
    frame_.lidar = ScanSegments(segments_, state_.pose, config_.lidar, noise,
                                config_.noise.lidar_sigma, frame_.sim_time);
  } else {
    frame_.lidar.reset();
  }
}

const SensorFrame& Simulation::Tick() {
  events_ = {};
  if (faulted_) {
    events_.fault = true;
    events_.fault_detail = "simulation frozen after integration fault; reset required";
    return frame_;
  }
  const NoisyCommand noisy =
      ActuateNoisy(pending_, config_.noise, streams_.actuator, config_.vehicle.actuator.max_drive_speed);
  const VehicleState prev = state_;
  try {
    state_ = Step(state_, config_.vehicle, noisy.command, config_.dt, noisy.disturbance);
  } catch (const IntegrationFault& e) {
    faulted_ = true;
    events_.fault = true;
    events_.fault_detail = e.what();
    return frame_;
  }
  // Feedback echoes what was commanded, not the noisy actuation.
  state_.command = pending_;
  ++ticks_;
  state_.sim_time = sim_time();
  events_.lidar = scheduler_.Due(sim_time());
  BuildFrame(prev, events_.lidar);

  const ContactReport contact =
      Collide({state_.pose, config_.vehicle.body_length, config_.vehicle.body_width},
              config_.scene);
  if (contact.contact && !in_contact_) {
    events_.collision_onset = true;
    events_.contact_feature = contact.feature;
    ++collision_count_;
  }
  in_contact_ = contact.contact;
  return frame_;
}

Json Simulation::TelemetryJson() const {
  Json j = SensorFrameToJson(frame_);
  j["truth"] = {{"pose", {state_.pose.x, state_.pose.y, state_.pose.yaw}},
                {"v", {state_.v_x, state_.v_y}},
                {"yaw_rate", state_.yaw_rate},
                {"steer_angle", state_.steer_angle}};
  return j;
}

}  // namespace minicar
