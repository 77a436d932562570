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

#include "minicar/dynamics/vehicle_config.h"

#include <cmath>
#include <string>

#include "minicar/core/error.h"

namespace minicar {

namespace {

void RequirePositive(double v, const std::string& key) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError(key + ": must be positive, got " + std::to_string(v));
  }
}

void RequireNonNegative(double v, const std::string& key) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw ConfigError(key + ": must be non-negative, got " + std::to_string(v));
  }
}

SlipPoint ParseAnchor(const Json& arr, const std::string& where) {
  if (!arr.is_array() || arr.size() != 2 || !arr[0].is_number() || !arr[1].is_number()) {
    throw ConfigError(where + ": expected [slip, force]");
  }
  return {arr[0].get<double>(), arr[1].get<double>()};
}

FrictionCurve ParseCurve(const Json& obj, const std::string& where) {
  const Json& anchors = RequireArray(obj, "anchors", where);
  if (anchors.size() != 3) throw ConfigError(where + ".anchors: expected three points");
  const double slope = RequireNumber(obj, "initial_slope", where);
  try {
    return FrictionCurve::Fit(ParseAnchor(anchors[0], where + ".anchors[0]"),
                              ParseAnchor(anchors[1], where + ".anchors[1]"),
                              ParseAnchor(anchors[2], where + ".anchors[2]"), slope);
  } catch (const ConfigError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

Json CurveToJson(const FrictionCurve& c) {
  return {{"anchors",
           {{c.origin().slip, c.origin().force},
            {c.extremum().slip, c.extremum().force},
            {c.asymptote().slip, c.asymptote().force}}},
          {"initial_slope", c.initial_slope()}};
}

FrictionCurve DefaultCurve() {
  return FrictionCurve::Fit({0.0, 0.0}, {0.2, 1.0}, {0.8, 0.75}, 10.0);
}

}  // namespace

double MassLayout::total_mass() const {
  double total = 0.0;
  for (const auto& m : sprung_masses) total += m.mass;
  return total;
}

Vec3 CenterOfMass(const MassLayout& layout) {
  if (layout.sprung_masses.empty()) throw ConfigError("mass_layout: no sprung masses");
  double total = 0.0;
  Vec3 moment;
  for (std::size_t i = 0; i < layout.sprung_masses.size(); ++i) {
    const SprungMass& m = layout.sprung_masses[i];
    if (!(m.mass > 0.0)) {
      throw ConfigError("mass_layout.sprung_masses[" + std::to_string(i) +
                        "].mass: must be positive");
    }
    total += m.mass;
    moment.x += m.mass * m.position.x;
    moment.y += m.mass * m.position.y;
    moment.z += m.mass * m.position.z;
  }
  return {moment.x / total, moment.y / total, moment.z / total};
}

VehicleConfig VehicleConfig::Default() {
  VehicleConfig cfg;
  cfg.longitudinal_friction = DefaultCurve();
  cfg.lateral_friction = DefaultCurve();
  const double hx = 0.5 * cfg.geometry.wheelbase;
  const double hy = 0.5 * cfg.geometry.track;
  // Corner order: FL, FR, RL, RR.
  const std::array<Vec2, kNumCorners> corners = {{{hx, hy}, {hx, -hy}, {-hx, hy}, {-hx, -hy}}};
  for (const Vec2& c : corners) {
    cfg.mass_layout.sprung_masses.push_back({0.55, {c.x, c.y, cfg.cg_height}});
  }
  return cfg;
}

VehicleConfig VehicleConfig::FromJson(const Json& doc) {
  if (!doc.is_object()) throw ConfigError("vehicle: expected a JSON object");
  VehicleConfig cfg = Default();

  if (doc.contains("mass_layout")) {
    const Json& layout = RequireObject(doc, "mass_layout", "");
    const Json& masses = RequireArray(layout, "sprung_masses", "mass_layout");
    cfg.mass_layout.sprung_masses.clear();
    for (std::size_t i = 0; i < masses.size(); ++i) {
      const std::string where = "mass_layout.sprung_masses[" + std::to_string(i) + "]";
      SprungMass m;
      m.mass = RequireNumber(masses[i], "mass", where);
      const Json& pos = RequireArray(masses[i], "position", where);
      if (pos.size() != 3) throw ConfigError(where + ".position: expected 3 numbers");
      for (const auto& p : pos) {
        if (!p.is_number()) throw ConfigError(where + ".position: expected 3 numbers");
      }
      m.position = {pos[0].get<double>(), pos[1].get<double>(), pos[2].get<double>()};
      cfg.mass_layout.sprung_masses.push_back(m);
    }
  }
  if (doc.contains("geometry")) {
    const Json& g = RequireObject(doc, "geometry", "");
    cfg.geometry.wheelbase = NumberOr(g, "wheelbase", cfg.geometry.wheelbase, "geometry");
    cfg.geometry.track = NumberOr(g, "track", cfg.geometry.track, "geometry");
    cfg.geometry.max_steer = NumberOr(g, "max_steer", cfg.geometry.max_steer, "geometry");
  }
  if (doc.contains("wheel")) {
    const Json& w = RequireObject(doc, "wheel", "");
    cfg.wheel.radius = NumberOr(w, "radius", cfg.wheel.radius, "wheel");
    cfg.wheel.mass = NumberOr(w, "mass", cfg.wheel.mass, "wheel");
    cfg.wheel.rolling_damping =
        NumberOr(w, "rolling_damping", cfg.wheel.rolling_damping, "wheel");
  }
  if (doc.contains("suspension")) {
    const Json& s = RequireObject(doc, "suspension", "");
    cfg.suspension.spring_k = NumberOr(s, "spring_k", cfg.suspension.spring_k, "suspension");
    cfg.suspension.damping_b = NumberOr(s, "damping_b", cfg.suspension.damping_b, "suspension");
    cfg.suspension.travel_limit =
        NumberOr(s, "travel_limit", cfg.suspension.travel_limit, "suspension");
    cfg.suspension.equilibrium_gap =
        NumberOr(s, "equilibrium_gap", cfg.suspension.equilibrium_gap, "suspension");
  }
  if (doc.contains("friction")) {
    const Json& f = RequireObject(doc, "friction", "");
    if (f.contains("longitudinal")) {
      cfg.longitudinal_friction =
          ParseCurve(RequireObject(f, "longitudinal", "friction"), "friction.longitudinal");
    }
    if (f.contains("lateral")) {
      cfg.lateral_friction = ParseCurve(RequireObject(f, "lateral", "friction"), "friction.lateral");
    }
  }
  if (doc.contains("actuator")) {
    const Json& a = RequireObject(doc, "actuator", "");
    ActuatorConfig& act = cfg.actuator;
    act.max_drive_speed = NumberOr(a, "max_drive_speed", act.max_drive_speed, "actuator");
    act.max_drive_torque = NumberOr(a, "max_drive_torque", act.max_drive_torque, "actuator");
    act.drive_gain = NumberOr(a, "drive_gain", act.drive_gain, "actuator");
    act.brake_torque = NumberOr(a, "brake_torque", act.brake_torque, "actuator");
    act.steer_inertia = NumberOr(a, "steer_inertia", act.steer_inertia, "actuator");
    act.max_steer_rate = NumberOr(a, "max_steer_rate", act.max_steer_rate, "actuator");
    act.steer_time_constant =
        NumberOr(a, "steer_time_constant", act.steer_time_constant, "actuator");
  }
  cfg.gravity = NumberOr(doc, "gravity", cfg.gravity, "");
  cfg.body_length = NumberOr(doc, "body_length", cfg.body_length, "");
  cfg.body_width = NumberOr(doc, "body_width", cfg.body_width, "");
  cfg.cg_height = NumberOr(doc, "cg_height", cfg.cg_height, "");
  cfg.slip_epsilon = NumberOr(doc, "slip_epsilon", cfg.slip_epsilon, "");
  cfg.Validate();
  return cfg;
}

VehicleConfig VehicleConfig::Load(const std::filesystem::path& path) {
  try {
    return FromJson(ReadJsonFile(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

Json VehicleConfig::ToJson() const {
  Json masses = Json::array();
  for (const auto& m : mass_layout.sprung_masses) {
    masses.push_back({{"mass", m.mass}, {"position", {m.position.x, m.position.y, m.position.z}}});
  }
  return {
      {"mass_layout", {{"sprung_masses", masses}}},
      {"geometry",
       {{"wheelbase", geometry.wheelbase},
        {"track", geometry.track},
        {"max_steer", geometry.max_steer}}},
      {"wheel",
       {{"radius", wheel.radius},
        {"mass", wheel.mass},
        {"rolling_damping", wheel.rolling_damping}}},
      {"suspension",
       {{"spring_k", suspension.spring_k},
        {"damping_b", suspension.damping_b},
        {"travel_limit", suspension.travel_limit},
        {"equilibrium_gap", suspension.equilibrium_gap}}},
      {"friction",
       {{"longitudinal", CurveToJson(longitudinal_friction)},
        {"lateral", CurveToJson(lateral_friction)}}},
      {"actuator",
       {{"max_drive_speed", actuator.max_drive_speed},
        {"max_drive_torque", actuator.max_drive_torque},
        {"drive_gain", actuator.drive_gain},
        {"brake_torque", actuator.brake_torque},
        {"steer_inertia", actuator.steer_inertia},
        {"max_steer_rate", actuator.max_steer_rate},
        {"steer_time_constant", actuator.steer_time_constant}}},
      {"gravity", gravity},
      {"body_length", body_length},
      {"body_width", body_width},
      {"cg_height", cg_height},
      {"slip_epsilon", slip_epsilon},
  };
}

void VehicleConfig::Validate() const {
  if (mass_layout.sprung_masses.size() != kNumCorners) {
    throw ConfigError("mass_layout.sprung_masses: expected one mass per corner (4), got " +
                      std::to_string(mass_layout.sprung_masses.size()));
  }
  CenterOfMass(mass_layout);  // validates masses
  RequirePositive(geometry.wheelbase, "geometry.wheelbase");
  RequirePositive(geometry.track, "geometry.track");
  if (!(geometry.max_steer > 0.0 && geometry.max_steer < 0.5 * kPi)) {
    throw ConfigError("geometry.max_steer: must lie in (0, pi/2)");
  }
  RequirePositive(wheel.radius, "wheel.radius");
  RequirePositive(wheel.mass, "wheel.mass");
  RequireNonNegative(wheel.rolling_damping, "wheel.rolling_damping");
  RequirePositive(suspension.spring_k, "suspension.spring_k");
  RequireNonNegative(suspension.damping_b, "suspension.damping_b");
  RequirePositive(suspension.travel_limit, "suspension.travel_limit");
  RequirePositive(suspension.equilibrium_gap, "suspension.equilibrium_gap");
  RequirePositive(actuator.max_drive_speed, "actuator.max_drive_speed");
  RequirePositive(actuator.max_drive_torque, "actuator.max_drive_torque");
  RequirePositive(actuator.drive_gain, "actuator.drive_gain");
  RequirePositive(actuator.brake_torque, "actuator.brake_torque");
  RequirePositive(actuator.steer_inertia, "actuator.steer_inertia");
  RequirePositive(actuator.max_steer_rate, "actuator.max_steer_rate");
  RequirePositive(actuator.steer_time_constant, "actuator.steer_time_constant");
  RequirePositive(gravity, "gravity");
  RequirePositive(body_length, "body_length");
  RequirePositive(body_width, "body_width");
  RequireNonNegative(cg_height, "cg_height");
  RequirePositive(slip_epsilon, "slip_epsilon");
}

double VehicleConfig::planar_mass() const {
  return mass_layout.total_mass() + kNumCorners * wheel.mass;
}

double VehicleConfig::yaw_inertia() const {
  const Vec3 com = center_of_mass();
  double inertia = 0.0;
  for (const auto& m : mass_layout.sprung_masses) {
    const double dx = m.position.x - com.x;
    const double dy = m.position.y - com.y;
    inertia += m.mass * (dx * dx + dy * dy);
  }
  for (const Vec2& p : wheel_positions()) inertia += wheel.mass * Dot(p, p);
  return inertia;
}

std::array<Vec2, kNumCorners> VehicleConfig::wheel_positions() const {
  const Vec3 com = center_of_mass();
  const double hx = 0.5 * geometry.wheelbase;
  const double hy = 0.5 * geometry.track;
  return {{{hx - com.x, hy - com.y},
           {hx - com.x, -hy - com.y},
           {-hx - com.x, hy - com.y},
           {-hx - com.x, -hy - com.y}}};
}

std::array<double, kNumCorners> VehicleConfig::corner_masses() const {
  std::array<double, kNumCorners> out{};
  for (int i = 0; i < kNumCorners; ++i) out[i] = mass_layout.sprung_masses.at(i).mass;
  return out;
}

}  // namespace minicar
