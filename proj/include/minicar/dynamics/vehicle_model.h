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

// Quasi-3D vehicle model: planar chassis (x, y, yaw) plus four independent
// vertical sprung-mass/wheel corners whose contact forces load the tires.
//
// Integration per step():
//   1. steering servo: rate-limited first-order response, Ackermann split
//   2. vertical corners: backward Euler with a unilateral ground constraint
//   3. planar velocities and wheel spin: linearly implicit Euler on
//      (v_x, v_y, yaw_rate, wheel speeds), Jacobian by forward differences
//   4. pose and wheel angles from the new velocities
// Implicit treatment is required because the tire force slope divided by
// the wheel inertia gives time constants well below the 2 ms step.

#ifndef MINICAR_DYNAMICS_VEHICLE_MODEL_H_
#define MINICAR_DYNAMICS_VEHICLE_MODEL_H_

#include <array>

#include "minicar/core/geometry.h"
#include "minicar/dynamics/friction_curve.h"
#include "minicar/dynamics/vehicle_config.h"

namespace minicar {

// One suspension corner. Heights are absolute (ground at 0); the spring and
// damper act about the static equilibrium gap, and `preload` is the spring
// force at that gap.
struct SuspensionCorner {
  double spring_k = 0.0;         // N/m
  double damping_b = 0.0;        // N*s/m
  double sprung_height = 0.0;    // Z, m
  double sprung_rate = 0.0;      // dZ/dt, m/s
  double wheel_height = 0.0;     // z, wheel center, m
  double wheel_rate = 0.0;       // dz/dt, m/s
  double sprung_mass = 0.0;      // kg
  double wheel_mass = 0.0;       // kg
  double wheel_radius = 0.0;     // m, ground contact when z <= radius
  double travel_limit = 0.01;    // m
  double equilibrium_gap = 0.0;  // m
  double preload = 0.0;          // N

  // (Z - z) - equilibrium_gap.
  double deflection() const { return sprung_height - wheel_height - equilibrium_gap; }
};

// B*(dZ - dz) + K*((Z - z) - gap). Positive when the corner is extending
// beyond equilibrium; it pulls the sprung mass down and the wheel up.
double SuspensionForce(const SuspensionCorner& corner);

struct WheelVerticalAccel {
  double accel = 0.0;          // m/s^2
  double contact_force = 0.0;  // N, >= 0
};

// m*z'' = SuspensionForce - preload - m*g + contact, where the ground acts
// only while the wheel rests on it (z <= radius) and only pushes.
WheelVerticalAccel WheelVerticalAcceleration(const SuspensionCorner& corner, double gravity);

struct WheelState {
  double radius = 0.0;                // m
  double angular_velocity = 0.0;      // rad/s
  double angular_acceleration = 0.0;  // rad/s^2
  double cumulative_angle = 0.0;      // rad
  double steer_angle = 0.0;           // rad, front wheels only
  double slip_long = 0.0;
  double slip_lat = 0.0;              // tan of the slip angle
  double normal_load = 0.0;           // N
  double drive_torque = 0.0;          // N*m last applied
};

struct Slip {
  double longitudinal = 0.0;
  double lateral = 0.0;
};

// Slip of a wheel of radius r spinning at omega whose contact point moves at
// `tire_velocity` expressed in the tire frame.
Slip ComputeSlip(double radius, double angular_velocity, Vec2 tire_velocity, double epsilon);

struct TireForce {
  double longitudinal = 0.0;  // N, tire frame
  double lateral = 0.0;       // N, opposes sideslip
};

TireForce ComputeTireForce(const FrictionCurve& longitudinal, const FrictionCurve& lateral,
                           Slip slip, double normal_load);

struct AckermannAngles {
  double left = 0.0;
  double right = 0.0;
};

// delta_l = atan(2 l tan(d) / (2 l + w tan(d))),
// delta_r = atan(2 l tan(d) / (2 l - w tan(d))), with d clamped to max_steer.
// These labels assume a positive steer turns right (the inner wheel is then
// the right one); WheelSteerAngles maps them onto this library's
// left-positive convention.
AckermannAngles ComputeAckermannAngles(const AckermannGeometry& geom, double steer);

// Road-wheel angles in the left-positive frame: the inner wheel of the turn
// always receives the larger angle.
AckermannAngles WheelSteerAngles(const AckermannGeometry& geom, double steer);

// Rear-wheel motor torque. Nonzero throttle tracks the wheel speed
// throttle * max_drive_speed / r with a proportional law clamped to
// +/-max_drive_torque. Zero throttle applies the holding torque: the same
// law toward zero speed, clamped to +/-brake_torque.
double DriveTorque(double throttle, double angular_velocity, double radius,
                   const ActuatorConfig& cfg);

// Moves the virtual steer angle toward cmd * max_steer. The slew rate is
// (target - current) / steer_time_constant limited to max_steer_rate, plus
// an optional rate disturbance; the result is clamped to +/-max_steer and
// never overshoots the target by the deterministic part.
double SteerDynamics(double cmd, double current, const AckermannGeometry& geom,
                     const ActuatorConfig& cfg, double dt, double rate_disturbance = 0.0);

struct DriveCommand {
  double throttle = 0.0;  // [-1, 1], positive drives forward
  double steering = 0.0;  // [-1, 1], positive turns left
};

// Actuator-side disturbance applied after the controller.
struct ActuatorDisturbance {
  double steer_rate = 0.0;  // rad/s added to the steering slew
};

struct VehicleState {
  Pose2 pose;              // center of mass, world frame
  double v_x = 0.0;        // m/s, body frame
  double v_y = 0.0;        // m/s
  double yaw_rate = 0.0;   // rad/s
  double accel_x = 0.0;    // m/s^2, body frame, previous step
  double accel_y = 0.0;
  std::array<SuspensionCorner, kNumCorners> corners{};
  std::array<WheelState, kNumCorners> wheels{};
  double steer_angle = 0.0;   // virtual (bicycle) steer angle, rad
  double steer_rate = 0.0;    // rad/s
  double steer_torque = 0.0;  // N*m, I_steer * steer acceleration
  DriveCommand command;       // last applied, echoed as feedback
  double sim_time = 0.0;      // s
};

// A vehicle at rest on flat ground with every corner at static equilibrium.
VehicleState SettledState(const VehicleConfig& cfg, const Pose2& pose = {});

// Slip of one wheel from the chassis velocities of `state`.
Slip ComputeWheelSlip(const VehicleState& state, const VehicleConfig& cfg, int wheel);

// Kinetic plus potential energy (gravity and springs), J.
double MechanicalEnergy(const VehicleState& state, const VehicleConfig& cfg);

bool IsFinite(const VehicleState& state);

// Advances one fixed step. dt must lie in (0, 0.01]. Commands are clamped to
// [-1, 1]. Throws IntegrationFault when handed or producing a non-finite
// state, std::invalid_argument on a bad dt.
VehicleState Step(const VehicleState& state, const VehicleConfig& cfg, DriveCommand cmd,
                  double dt, const ActuatorDisturbance& disturbance = {});

}  // namespace minicar

#endif  // MINICAR_DYNAMICS_VEHICLE_MODEL_H_
