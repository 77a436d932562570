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

#ifndef MINICAR_DYNAMICS_VEHICLE_CONFIG_H_
#define MINICAR_DYNAMICS_VEHICLE_CONFIG_H_

#include <array>
#include <filesystem>
#include <vector>

#include "minicar/core/geometry.h"
#include "minicar/core/json_util.h"
#include "minicar/dynamics/friction_curve.h"

namespace minicar {

// Corner order used by every per-wheel array in the vehicle model.
enum Corner : int { kFrontLeft = 0, kFrontRight = 1, kRearLeft = 2, kRearRight = 3 };
constexpr int kNumCorners = 4;

struct SprungMass {
  double mass = 0.0;  // kg
  Vec3 position;      // m, chassis frame relative to the geometric center
};

struct MassLayout {
  std::vector<SprungMass> sprung_masses;

  double total_mass() const;
};

// Mass-weighted mean of the sprung mass positions. Throws ConfigError on an
// empty layout or a non-positive mass.
Vec3 CenterOfMass(const MassLayout& layout);

struct AckermannGeometry {
  double wheelbase = 0.1725;     // m
  double track = 0.135;          // m
  double max_steer = kPi / 6.0;  // rad
};

struct WheelParams {
  double radius = 0.0325;         // m
  double mass = 0.05;             // kg
  double rolling_damping = 2e-5;  // N*m*s/rad, rotational loss per wheel
};

struct SuspensionParams {
  double spring_k = 500.0;        // N/m
  double damping_b = 8.0;         // N*s/m
  double travel_limit = 0.01;     // m, about static equilibrium
  double equilibrium_gap = 0.03;  // m, sprung-minus-wheel height at rest
};

struct ActuatorConfig {
  double max_drive_speed = 0.26;      // m/s at full throttle
  double max_drive_torque = 0.05;     // N*m per driven wheel
  double drive_gain = 0.02;           // N*m per rad/s of wheel speed error
  double brake_torque = 0.03;         // N*m, also the idle holding torque
  double steer_inertia = 1e-4;        // kg*m^2
  double max_steer_rate = 0.42;       // rad/s
  double steer_time_constant = 0.02;  // s, first-order lag below the rate limit
};

struct VehicleConfig {
  MassLayout mass_layout;
  AckermannGeometry geometry;
  WheelParams wheel;
  SuspensionParams suspension;
  FrictionCurve longitudinal_friction;
  FrictionCurve lateral_friction;
  ActuatorConfig actuator;
  double gravity = 9.81;       // m/s^2
  double body_length = 0.22;   // m, collision footprint
  double body_width = 0.16;    // m
  double cg_height = 0.04;     // m, used only for static load transfer
  double slip_epsilon = 1e-3;  // m/s, regularizes slip near standstill

  // Four 0.55 kg sprung masses at the wheel corners (2.2 kg total).
  static VehicleConfig Default();

  // Keys mirror the field names, SI units. Missing sections fall back to the
  // defaults; present keys are validated and errors name the key.
  static VehicleConfig FromJson(const Json& doc);
  static VehicleConfig Load(const std::filesystem::path& path);
  Json ToJson() const;

  // Throws ConfigError naming the first invalid field.
  void Validate() const;

  // Derived quantities.
  double planar_mass() const;  // sprung + unsprung
  double yaw_inertia() const;  // point masses about the center of mass
  double wheel_inertia() const { return 0.5 * wheel.mass * wheel.radius * wheel.radius; }
  Vec3 center_of_mass() const { return CenterOfMass(mass_layout); }
  // Wheel contact positions relative to the center of mass, in Corner order.
  std::array<Vec2, kNumCorners> wheel_positions() const;
  // Sprung mass carried by each corner, in Corner order.
  std::array<double, kNumCorners> corner_masses() const;
};

}  // namespace minicar

#endif  // MINICAR_DYNAMICS_VEHICLE_CONFIG_H_
