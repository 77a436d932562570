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

#include "minicar/dynamics/vehicle_model.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "Eigen/Dense"
#include "minicar/core/error.h"

namespace minicar {

namespace {

constexpr int kPlanarDofs = 3 + kNumCorners;  // v_x, v_y, yaw_rate, wheel speeds

using PlanarVector = Eigen::Matrix<double, kPlanarDofs, 1>;
using PlanarMatrix = Eigen::Matrix<double, kPlanarDofs, kPlanarDofs>;

bool IsRear(int wheel) { return wheel == kRearLeft || wheel == kRearRight; }

// Everything the planar force evaluation needs that stays frozen during the
// implicit solve.
struct PlanarInputs {
  std::array<Vec2, kNumCorners> positions;
  std::array<double, kNumCorners> steer;
  std::array<double, kNumCorners> normal_load;
  double throttle = 0.0;
};

struct WheelForces {
  Slip slip;
  TireForce tire;
  double drive_torque = 0.0;
};

// Contact point velocity of a wheel in its tire frame.
Vec2 TireVelocity(double v_x, double v_y, double yaw_rate, Vec2 position, double steer) {
  const Vec2 body{v_x - yaw_rate * position.y, v_y + yaw_rate * position.x};
  return Rotate(body, -steer);
}

// Generalized forces (mass-multiplied accelerations) of the planar DOFs.
PlanarVector PlanarForces(const PlanarVector& u, const PlanarInputs& in,
                          const VehicleConfig& cfg,
                          std::array<WheelForces, kNumCorners>* detail = nullptr) {
  const double mass = cfg.planar_mass();
  const double radius = cfg.wheel.radius;
  double fx = 0.0;
  double fy = 0.0;
  double mz = 0.0;
  PlanarVector f;
  for (int i = 0; i < kNumCorners; ++i) {
    const double omega = u(3 + i);
    const Vec2 vt = TireVelocity(u(0), u(1), u(2), in.positions[i], in.steer[i]);
    const Slip slip = ComputeSlip(radius, omega, vt, cfg.slip_epsilon);
    const TireForce tire = ComputeTireForce(cfg.longitudinal_friction, cfg.lateral_friction,
                                            slip, in.normal_load[i]);
    const Vec2 body = Rotate({tire.longitudinal, tire.lateral}, in.steer[i]);
    fx += body.x;
    fy += body.y;
    mz += in.positions[i].x * body.y - in.positions[i].y * body.x;

    const double drive = IsRear(i) ? DriveTorque(in.throttle, omega, radius, cfg.actuator) : 0.0;
    f(3 + i) = drive - radius * tire.longitudinal - cfg.wheel.rolling_damping * omega;
    if (detail != nullptr) (*detail)[i] = {slip, tire, drive};
  }
  f(0) = fx + mass * u(2) * u(1);
  f(1) = fy - mass * u(2) * u(0);
  f(2) = mz;
  return f;
}

// Backward Euler for one corner. Returns the ground contact force.
double StepCorner(SuspensionCorner& c, double gravity, double dt) {
  const double k = c.spring_k;
  const double b_eff = c.damping_b + dt * k;
  const double d0 = c.deflection();
  const double inv_m = 1.0 / c.sprung_mass + 1.0 / c.wheel_mass;
  const double sprung_bias = c.preload - c.sprung_mass * gravity;  // zero when balanced

  // Free flight: solve for the relative rate first.
  const double q0 = c.sprung_rate - c.wheel_rate;
  const double q = (q0 + dt * (sprung_bias / c.sprung_mass +
                               (c.preload + c.wheel_mass * gravity) / c.wheel_mass) -
                    dt * k * d0 * inv_m) /
                   (1.0 + dt * b_eff * inv_m);
  double s = b_eff * q + k * d0;
  double sprung_rate = c.sprung_rate + dt / c.sprung_mass * (sprung_bias - s);
  double wheel_rate = c.wheel_rate + dt / c.wheel_mass * (s - c.preload - c.wheel_mass * gravity);
  double contact = 0.0;

  if (c.wheel_height + dt * wheel_rate <= c.wheel_radius) {
    // Ground constraint active: the wheel lands exactly on the ground.
    wheel_rate = (c.wheel_radius - c.wheel_height) / dt;
    sprung_rate = (c.sprung_mass / dt * c.sprung_rate + sprung_bias + b_eff * wheel_rate -
                   k * d0) /
                  (c.sprung_mass / dt + b_eff);
    s = b_eff * (sprung_rate - wheel_rate) + k * d0;
    contact = c.wheel_mass * (wheel_rate - c.wheel_rate) / dt - s + c.preload +
              c.wheel_mass * gravity;
    contact = std::max(contact, 0.0);
  }

  c.sprung_rate = sprung_rate;
  c.wheel_rate = wheel_rate;
  c.sprung_height += dt * sprung_rate;
  c.wheel_height += dt * wheel_rate;
  if (contact > 0.0) c.wheel_height = c.wheel_radius;

  // Inelastic bump stop at the travel limit.
  const double d = c.deflection();
  if (std::abs(d) > c.travel_limit) {
    c.sprung_height = c.wheel_height + c.equilibrium_gap + std::copysign(c.travel_limit, d);
    if (contact > 0.0) {
      c.sprung_rate = c.wheel_rate;
    } else {
      const double common = (c.sprung_mass * c.sprung_rate + c.wheel_mass * c.wheel_rate) /
                            (c.sprung_mass + c.wheel_mass);
      c.sprung_rate = common;
      c.wheel_rate = common;
    }
  }
  return contact;
}

}  // namespace

double SuspensionForce(const SuspensionCorner& c) {
  return c.damping_b * (c.sprung_rate - c.wheel_rate) + c.spring_k * c.deflection();
}

WheelVerticalAccel WheelVerticalAcceleration(const SuspensionCorner& c, double gravity) {
  const double free_force = SuspensionForce(c) - c.preload - c.wheel_mass * gravity;
  WheelVerticalAccel out;
  if (c.wheel_height <= c.wheel_radius && free_force < 0.0) {
    out.contact_force = -free_force;
    out.accel = 0.0;
  } else {
    out.accel = free_force / c.wheel_mass;
  }
  return out;
}

Slip ComputeSlip(double radius, double angular_velocity, Vec2 tire_velocity, double epsilon) {
  const double denom = std::max(std::abs(tire_velocity.x), epsilon);
  return {(radius * angular_velocity - tire_velocity.x) / denom, tire_velocity.y / denom};
}

TireForce ComputeTireForce(const FrictionCurve& longitudinal, const FrictionCurve& lateral,
                           Slip slip, double normal_load) {
  if (!(normal_load > 0.0)) return {};
  return {normal_load * longitudinal.Evaluate(slip.longitudinal),
          -normal_load * lateral.Evaluate(slip.lateral)};
}

AckermannAngles ComputeAckermannAngles(const AckermannGeometry& geom, double steer) {
  const double d = std::clamp(steer, -geom.max_steer, geom.max_steer);
  const double t = std::tan(d);
  const double l2 = 2.0 * geom.wheelbase;
  return {std::atan(l2 * t / (l2 + geom.track * t)), std::atan(l2 * t / (l2 - geom.track * t))};
}

AckermannAngles WheelSteerAngles(const AckermannGeometry& geom, double steer) {
  const AckermannAngles a = ComputeAckermannAngles(geom, steer);
  return {a.right, a.left};
}

double DriveTorque(double throttle, double angular_velocity, double radius,
                   const ActuatorConfig& cfg) {
  if (throttle == 0.0) {
    return std::clamp(-cfg.drive_gain * angular_velocity, -cfg.brake_torque, cfg.brake_torque);
  }
  const double target = throttle * cfg.max_drive_speed / radius;
  return std::clamp(cfg.drive_gain * (target - angular_velocity), -cfg.max_drive_torque,
                    cfg.max_drive_torque);
}

double SteerDynamics(double cmd, double current, const AckermannGeometry& geom,
                     const ActuatorConfig& cfg, double dt, double rate_disturbance) {
  const double target = std::clamp(cmd, -1.0, 1.0) * geom.max_steer;
  const double error = target - current;
  const double rate =
      std::clamp(error / cfg.steer_time_constant, -cfg.max_steer_rate, cfg.max_steer_rate);
  double next = current + rate * dt;
  if ((error > 0.0 && next > target) || (error < 0.0 && next < target)) next = target;
  next += rate_disturbance * dt;
  return std::clamp(next, -geom.max_steer, geom.max_steer);
}

VehicleState SettledState(const VehicleConfig& cfg, const Pose2& pose) {
  VehicleState s;
  s.pose = pose;
  const auto masses = cfg.corner_masses();
  for (int i = 0; i < kNumCorners; ++i) {
    SuspensionCorner& c = s.corners[i];
    c.spring_k = cfg.suspension.spring_k;
    c.damping_b = cfg.suspension.damping_b;
    c.sprung_mass = masses[i];
    c.wheel_mass = cfg.wheel.mass;
    c.wheel_radius = cfg.wheel.radius;
    c.travel_limit = cfg.suspension.travel_limit;
    c.equilibrium_gap = cfg.suspension.equilibrium_gap;
    c.preload = masses[i] * cfg.gravity;
    c.wheel_height = cfg.wheel.radius;
    c.sprung_height = cfg.wheel.radius + cfg.suspension.equilibrium_gap;

    WheelState& w = s.wheels[i];
    w.radius = cfg.wheel.radius;
    w.normal_load = c.preload + c.wheel_mass * cfg.gravity;
  }
  return s;
}

Slip ComputeWheelSlip(const VehicleState& state, const VehicleConfig& cfg, int wheel) {
  const auto positions = cfg.wheel_positions();
  const WheelState& w = state.wheels.at(wheel);
  const Vec2 vt =
      TireVelocity(state.v_x, state.v_y, state.yaw_rate, positions[wheel], w.steer_angle);
  return ComputeSlip(w.radius, w.angular_velocity, vt, cfg.slip_epsilon);
}

double MechanicalEnergy(const VehicleState& s, const VehicleConfig& cfg) {
  double e = 0.5 * cfg.planar_mass() * (s.v_x * s.v_x + s.v_y * s.v_y) +
             0.5 * cfg.yaw_inertia() * s.yaw_rate * s.yaw_rate;
  const double iw = cfg.wheel_inertia();
  for (const WheelState& w : s.wheels) e += 0.5 * iw * w.angular_velocity * w.angular_velocity;
  for (const SuspensionCorner& c : s.corners) {
    const double compression = c.preload / c.spring_k - c.deflection();
    e += 0.5 * c.sprung_mass * c.sprung_rate * c.sprung_rate +
         0.5 * c.wheel_mass * c.wheel_rate * c.wheel_rate +
         0.5 * c.spring_k * compression * compression +
         cfg.gravity * (c.sprung_mass * c.sprung_height + c.wheel_mass * c.wheel_height);
  }
  return e;
}

bool IsFinite(const VehicleState& s) {
  auto ok = [](double v) { return std::isfinite(v); };
  if (!ok(s.pose.x) || !ok(s.pose.y) || !ok(s.pose.yaw) || !ok(s.v_x) || !ok(s.v_y) ||
      !ok(s.yaw_rate) || !ok(s.accel_x) || !ok(s.accel_y) || !ok(s.steer_angle) ||
      !ok(s.steer_rate) || !ok(s.sim_time)) {
    return false;
  }
  for (const auto& c : s.corners) {
    if (!ok(c.sprung_height) || !ok(c.sprung_rate) || !ok(c.wheel_height) ||
        !ok(c.wheel_rate)) {
      return false;
    }
  }
  for (const auto& w : s.wheels) {
    if (!ok(w.angular_velocity) || !ok(w.cumulative_angle) || !ok(w.normal_load)) return false;
  }
  return true;
}

VehicleState Step(const VehicleState& state, const VehicleConfig& cfg, DriveCommand cmd,
                  double dt, const ActuatorDisturbance& disturbance) {
  if (!(dt > 0.0 && dt <= 0.01)) throw std::invalid_argument("step: dt must lie in (0, 0.01]");
  if (!IsFinite(state)) throw IntegrationFault("step: non-finite input state");
  if (!std::isfinite(cmd.throttle) || !std::isfinite(cmd.steering) ||
      !std::isfinite(disturbance.steer_rate)) {
    throw IntegrationFault("step: non-finite command");
  }
  cmd.throttle = std::clamp(cmd.throttle, -1.0, 1.0);
  cmd.steering = std::clamp(cmd.steering, -1.0, 1.0);

  VehicleState next = state;
  next.command = cmd;

  // 1. Steering servo.
  next.steer_angle = SteerDynamics(cmd.steering, state.steer_angle, cfg.geometry, cfg.actuator,
                                   dt, disturbance.steer_rate);
  next.steer_rate = (next.steer_angle - state.steer_angle) / dt;
  next.steer_torque = cfg.actuator.steer_inertia * (next.steer_rate - state.steer_rate) / dt;
  const AckermannAngles road = WheelSteerAngles(cfg.geometry, next.steer_angle);

  PlanarInputs in;
  in.positions = cfg.wheel_positions();
  in.steer = {road.left, road.right, 0.0, 0.0};
  in.throttle = cmd.throttle;

  // 2. Vertical corners, then static load transfer from last step's
  // acceleration: dN = -M a_x h / (2 l) front, + rear; -M a_y h / (2 w)
  // left, + right.
  const double mass = cfg.planar_mass();
  const double pitch = mass * state.accel_x * cfg.cg_height / (2.0 * cfg.geometry.wheelbase);
  const double roll = mass * state.accel_y * cfg.cg_height / (2.0 * cfg.geometry.track);
  const std::array<double, kNumCorners> transfer = {-pitch - roll, -pitch + roll, pitch - roll,
                                                    pitch + roll};
  for (int i = 0; i < kNumCorners; ++i) {
    const double contact = StepCorner(next.corners[i], cfg.gravity, dt);
    in.normal_load[i] = contact > 0.0 ? std::max(0.0, contact + transfer[i]) : 0.0;
  }

  // 3. Linearly implicit Euler on the planar DOFs:
  //    (M - dt J) du = dt f(u).
  PlanarVector u;
  u << state.v_x, state.v_y, state.yaw_rate, state.wheels[0].angular_velocity,
      state.wheels[1].angular_velocity, state.wheels[2].angular_velocity,
      state.wheels[3].angular_velocity;
  const PlanarVector f0 = PlanarForces(u, in, cfg);
  PlanarMatrix jac;
  for (int j = 0; j < kPlanarDofs; ++j) {
    const double h = 1e-7 * std::max(1.0, std::abs(u(j)));
    PlanarVector up = u;
    up(j) += h;
    jac.col(j) = (PlanarForces(up, in, cfg) - f0) / h;
  }
  PlanarVector inertia;
  const double iw = cfg.wheel_inertia();
  inertia << mass, mass, cfg.yaw_inertia(), iw, iw, iw, iw;
  PlanarMatrix system = -dt * jac;
  system.diagonal() += inertia;
  const PlanarVector du = system.partialPivLu().solve(dt * f0);
  const PlanarVector u1 = u + du;

  next.v_x = u1(0);
  next.v_y = u1(1);
  next.yaw_rate = u1(2);
  // Body-frame acceleration of the center of mass.
  next.accel_x = (u1(0) - u(0)) / dt - u1(2) * u1(1);
  next.accel_y = (u1(1) - u(1)) / dt + u1(2) * u1(0);

  // 4. Pose from the updated velocities.
  next.pose.yaw = WrapAngle(state.pose.yaw + dt * next.yaw_rate);
  const double c = std::cos(next.pose.yaw);
  const double s = std::sin(next.pose.yaw);
  next.pose.x += dt * (c * next.v_x - s * next.v_y);
  next.pose.y += dt * (s * next.v_x + c * next.v_y);

  std::array<WheelForces, kNumCorners> detail;
  PlanarForces(u1, in, cfg, &detail);
  for (int i = 0; i < kNumCorners; ++i) {
    WheelState& w = next.wheels[i];
    w.angular_acceleration = (u1(3 + i) - w.angular_velocity) / dt;
    w.angular_velocity = u1(3 + i);
    w.cumulative_angle += dt * w.angular_velocity;
    w.steer_angle = in.steer[i];
    w.slip_long = detail[i].slip.longitudinal;
    w.slip_lat = detail[i].slip.lateral;
    w.normal_load = in.normal_load[i];
    w.drive_torque = detail[i].drive_torque;
  }
  next.sim_time = state.sim_time + dt;

  if (!IsFinite(next)) throw IntegrationFault("step: integration produced a non-finite state");
  return next;
}

}  // namespace minicar
