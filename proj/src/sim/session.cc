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


#include "minicar/sim/session.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <thread>

#include "minicar/core/error.h"
#include "minicar/sim/park.h"
#include "minicar/world/collision.h"

namespace minicar {

namespace {

constexpr std::size_t kTelemetryParticles = 100;

bool IsSimpleName(const std::string& name) {
  if (name.empty() || name.size() > 64) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

double RequireField(const Json& msg, const char* key) {
  if (!msg.contains(key) || !msg[key].is_number()) {
    throw ParseError(std::string("'") + key + "' must be a number");
  }
  const double v = msg[key].get<double>();
  if (!std::isfinite(v)) throw ParseError(std::string("'") + key + "' must be finite");
  return v;
}

Json PoseJson(const Pose2& p) { return {p.x, p.y, p.yaw}; }

}  // namespace

const char* ModeName(SessionMode mode) {
  switch (mode) {
    case SessionMode::kManual:
      return "manual";
    case SessionMode::kParking:
      return "parking";
    case SessionMode::kBcDrive:
      return "bc_drive";
  }
  return "?";
}

SessionMode ParseMode(const std::string& name) {
  if (name == "manual") return SessionMode::kManual;
  if (name == "parking") return SessionMode::kParking;
  if (name == "bc_drive") return SessionMode::kBcDrive;
  throw ConfigError("mode: expected manual, parking or bc_drive, got '" + name + "'");
}

void SessionConfig::Validate() const {
  if (!(dt > 0.0 && dt <= 0.01)) throw ConfigError("dt: must lie in (0, 0.01]");
  if (!(realtime_factor >= 0.0) || !std::isfinite(realtime_factor)) {
    throw ConfigError("realtime_factor: must be >= 0");
  }
  if (!std::filesystem::is_regular_file(scene_path)) {
    throw ConfigError("scene: no such file " + scene_path.string());
  }
  if (vehicle_path && !std::filesystem::is_regular_file(*vehicle_path)) {
    throw ConfigError("vehicle: no such file " + vehicle_path->string());
  }
  if (model_path && !std::filesystem::is_regular_file(*model_path)) {
    throw ConfigError("model: no such file " + model_path->string());
  }
  if (mode == SessionMode::kBcDrive && !model_path) {
    throw ConfigError("mode: bc_drive needs a model");
  }
  if (!(deadman_timeout > 0.0)) throw ConfigError("deadman_timeout: must be positive");
  noise.Validate();
}

Session::Session(SessionConfig config) : config_(std::move(config)), mode_(config_.mode) {
  config_.Validate();
  config_.noise.seed = config_.seed;
  vehicle_ = config_.vehicle_path ? VehicleConfig::Load(*config_.vehicle_path)
                                  : VehicleConfig::Default();
  if (config_.model_path) model_ = BcModel::Load(*config_.model_path);
  LoadScene(config_.scene_path);
}

Session::~Session() {
  if (recorder_) StopRecording();
}

void Session::LoadScene(const std::filesystem::path& path) {
  SimulationConfig sc;
  sc.scene = LoadSceneFile(path);
  sc.vehicle = vehicle_;
  sc.noise = config_.noise;
  sc.dt = config_.dt;
  sim_ = std::make_unique<Simulation>(sc);
  goal_.reset();
  ResetModeState();
}

void Session::ResetModeState() {
  manual_ = {};
  manual_time_ = sim_->sim_time();
  applied_ = {};
  mission_.reset();
  mission_done_reported_ = false;
  driver_.reset();
  if (mode_ == SessionMode::kBcDrive && model_) driver_.emplace(*model_, vehicle_.wheel.radius);
  if (sim_->scene().centerline.size() >= 2) {
    laps_.emplace(sim_->scene());
  } else {
    laps_.reset();
  }
  if (mode_ == SessionMode::kParking && goal_) StartMission(*goal_);
}

void Session::StartMission(const Pose2& goal) {
  ParkRunConfig defaults = ParkingSchoolRun(sim_->scene(), config_.seed, false);
  MissionConfig mc = defaults.mission;
  mc.goal = goal;
  mission_.emplace(sim_->scene().bounds, mc, vehicle_.wheel.radius, config_.dt, config_.seed);
  mission_done_reported_ = false;
  pending_events_.push_back({{"type", "event"},
                             {"kind", "stage"},
                             {"t", sim_->sim_time()},
                             {"stage", StageName(mission_->stage())}});
}

Json Session::Ack(const Json& msg, const std::string& detail) const {
  Json j = {{"type", "ack"}, {"ref", msg.contains("id") ? msg["id"] : msg.value("type", Json())}};
  if (!detail.empty()) j["detail"] = detail;
  return j;
}

Json Session::Err(const Json& msg, const std::string& detail) const {
  Json ref;
  if (msg.is_object()) ref = msg.contains("id") ? msg["id"] : msg.value("type", Json());
  return {{"type", "err"}, {"ref", ref}, {"detail", detail}};
}

bool Session::TakeToken(int client) {
  if (!token_) token_ = client;
  return *token_ == client;
}

void Session::ClientLeft(int client) {
  if (token_ == client) token_.reset();
}

Json Session::HandleText(const std::string& text, int client) {
  Json msg;
  try {
    msg = Json::parse(text);
  } catch (const Json::parse_error& e) {
    return Err(Json(), std::string("malformed JSON: ") + e.what());
  }
  return HandleMessage(msg, client);
}

Json Session::HandleMessage(const Json& msg, int client) {
  if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string()) {
    return Err(msg, "message must be an object with a string 'type'");
  }
  try {
    return Dispatch(msg, client);
  } catch (const std::exception& e) {
    return Err(msg, e.what());
  }
}

Json Session::Dispatch(const Json& msg, int client) {
  const std::string type = msg["type"];
  if (type == "token") {
    const std::string action = msg.value("action", "");
    if (action == "acquire") {
      if (!TakeToken(client)) return Err(msg, "control token held by another client");
      return Ack(msg);
    }
    if (action == "release") {
      if (token_ == client) token_.reset();
      return Ack(msg);
    }
    return Err(msg, "token action must be 'acquire' or 'release'");
  }

  static const char* kMutating[] = {"cmd", "reset", "load_scene", "set_goal", "set_mode", "record"};
  if (std::find(std::begin(kMutating), std::end(kMutating), type) == std::end(kMutating)) {
    return Err(msg, "unknown message type '" + type + "'");
  }
  if (!TakeToken(client)) return Err(msg, "control token held by another client");

  if (type == "cmd") {
    const DriveCommand raw{RequireField(msg, "throttle"), RequireField(msg, "steering")};
    if (mode_ != SessionMode::kManual) {
      return Err(msg, std::string("cmd is only accepted in manual mode (mode is ") +
                          ModeName(mode_) + ")");
    }
    manual_ = {std::clamp(raw.throttle, -1.0, 1.0), std::clamp(raw.steering, -1.0, 1.0)};
    manual_time_ = sim_->sim_time();
    const bool clamped = manual_.throttle != raw.throttle || manual_.steering != raw.steering;
    Json ack = Ack(msg);
    if (clamped) ack["warning"] = "command clamped to [-1, 1]";
    return ack;
  }

  if (type == "reset") {
    std::optional<Pose2> pose;
    if (msg.contains("pose") && !msg["pose"].is_null()) {
      const Json& p = msg["pose"];
      if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() ||
          !p[2].is_number()) {
        return Err(msg, "'pose' must be [x, y, yaw]");
      }
      pose = Pose2{p[0].get<double>(), p[1].get<double>(), p[2].get<double>()};
      if (!sim_->scene().bounds.Contains(pose->position())) {
        return Err(msg, "pose lies outside the scene bounds");
      }
    }
    sim_->Reset(pose);
    goal_.reset();
    ResetModeState();
    return Ack(msg);
  }

  if (type == "load_scene") {
    if (!msg.contains("name") || !msg["name"].is_string()) return Err(msg, "'name' must be a string");
    const std::string name = msg["name"];
    if (!IsSimpleName(name)) return Err(msg, "scene name may contain only letters, digits, '_' and '-'");
    const auto path = config_.scenes_dir / (name + ".json");
    if (!std::filesystem::is_regular_file(path)) return Err(msg, "no scene named '" + name + "'");
    if (recorder_) {
      for (Json& e : StopRecording()) pending_events_.push_back(std::move(e));
    }
    LoadScene(path);
    return Ack(msg);
  }

  if (type == "set_goal") {
    const Pose2 goal{RequireField(msg, "x"), RequireField(msg, "y"), RequireField(msg, "yaw")};
    if (!sim_->scene().bounds.Contains(goal.position())) {
      return Err(msg, "goal lies outside the scene bounds");
    }
    const ContactReport hit =
        Collide(Footprint{goal, vehicle_.body_length, vehicle_.body_width}, sim_->scene());
    if (hit.contact) return Err(msg, "goal footprint overlaps " + hit.feature);
    goal_ = goal;
    if (mode_ == SessionMode::kParking) {
      StartMission(goal);
      return Ack(msg);
    }
    return Ack(msg, "goal stored; switch to parking mode to start the mission");
  }

  if (type == "set_mode") {
    if (!msg.contains("mode") || !msg["mode"].is_string()) return Err(msg, "'mode' must be a string");
    const SessionMode next = ParseMode(msg["mode"]);
    if (next == SessionMode::kBcDrive && !model_) return Err(msg, "bc_drive needs a loaded model");
    mode_ = next;
    ResetModeState();
    return Ack(msg);
  }

  // record
  if (!msg.contains("on") || !msg["on"].is_boolean()) return Err(msg, "'on' must be a boolean");
  if (msg["on"].get<bool>()) {
    if (!config_.record_path) return Err(msg, "no recording path configured");
    if (recorder_) return Ack(msg, "already recording");
    StartRecording();
    if (!record_file_) {
      recorder_.reset();
      return Err(msg, "cannot open " + config_.record_path->string());
    }
    pending_events_.push_back({{"type", "event"}, {"kind", "recording"}, {"on", true}});
    return Ack(msg);
  }
  if (!recorder_) return Ack(msg, "not recording");
  for (Json& e : StopRecording()) pending_events_.push_back(std::move(e));
  return Ack(msg);
}

void Session::StartRecording() {
  record_file_ = std::ofstream(*config_.record_path, std::ios::app);
  const FeatureSpec spec = model_ ? model_->features : FeatureSpec{};
  recorder_ = std::make_unique<Recorder>(record_file_, spec, vehicle_.wheel.radius, sim_->scene());
}

std::vector<Json> Session::StopRecording() {
  recorder_->Finish();
  Json ev = {{"type", "event"},
             {"kind", "recording"},
             {"on", false},
             {"rows", recorder_->rows()},
             {"laps", recorder_->laps()}};
  recorder_.reset();
  record_file_.close();
  return {ev};
}

Session::TickOutput Session::Tick() {
  TickOutput out;
  out.events = std::move(pending_events_);
  pending_events_.clear();
  const bool was_faulted = sim_->faulted();
  const SensorFrame& frame = sim_->Tick();
  const TickEvents ev = sim_->events();
  const double t = sim_->sim_time();
  if (ev.fault) {
    if (!was_faulted) {
      out.events.push_back(
          {{"type", "event"}, {"kind", "failure"}, {"t", t}, {"detail", ev.fault_detail}});
    }
    return out;
  }
  if (ev.collision_onset) {
    out.events.push_back(
        {{"type", "event"}, {"kind", "collision"}, {"t", t}, {"feature", ev.contact_feature}});
  }
  if (laps_) laps_->Update(sim_->state().pose.position());

  DriveCommand cmd;
  switch (mode_) {
    case SessionMode::kManual:
      if (t - manual_time_ > config_.deadman_timeout) manual_ = {};
      cmd = manual_;
      break;
    case SessionMode::kParking:
      if (mission_) {
        cmd = mission_->Tick(frame, sim_->state().pose);
        if (mission_->stage_changed()) {
          out.events.push_back({{"type", "event"},
                                {"kind", "stage"},
                                {"t", t},
                                {"stage", StageName(mission_->stage())}});
        }
        if (mission_->finished() && !mission_done_reported_) {
          mission_done_reported_ = true;
          if (mission_->stage() == MissionStage::kParked) {
            out.events.push_back({{"type", "event"}, {"kind", "parked"}, {"t", t}});
          } else {
            out.events.push_back({{"type", "event"},
                                  {"kind", "failure"},
                                  {"t", t},
                                  {"detail", mission_->failure()}});
          }
        }
      }
      break;
    case SessionMode::kBcDrive:
      if (driver_) cmd = driver_->Step(frame);
      break;
  }
  sim_->SetCommand(cmd);
  applied_ = sim_->pending_command();

  if (recorder_) {
    recorder_->Observe(*sim_, applied_);
    if (!recorder_->ok()) {
      const std::string path = config_.record_path->string();
      recorder_.reset();
      record_file_.close();
      out.events.push_back({{"type", "event"},
                            {"kind", "failure"},
                            {"t", t},
                            {"detail", "recording stopped: write to " + path + " failed"}});
    }
  }

  Json tel = sim_->TelemetryJson();
  tel["type"] = "telemetry";
  tel["mode"] = ModeName(mode_);
  tel["cmd"] = {applied_.throttle, applied_.steering};
  tel["recording"] = recorder_ != nullptr;
  if (recorder_) tel["recorded_rows"] = recorder_->rows();
  tel["laps"] = laps();
  if (goal_) tel["goal"] = PoseJson(*goal_);
  if (mission_) {
    tel["stage"] = StageName(mission_->stage());
    tel["estimate"] = PoseJson(mission_->estimate());
    tel["replans"] = mission_->replan_count();
    if (frame.lidar || mission_->stage_changed()) {
      Json path = Json::array();
      for (const Vec2& w : mission_->path().waypoints) path.push_back({w.x, w.y});
      tel["path"] = std::move(path);
      if (const ParticleFilter* pf = mission_->filter()) {
        const auto& ps = pf->particles();
        const std::size_t stride =
            std::max<std::size_t>(1, (ps.size() + kTelemetryParticles - 1) / kTelemetryParticles);
        Json particles = Json::array();
        for (std::size_t i = 0; i < ps.size(); i += stride) {
          particles.push_back({ps[i].pose.x, ps[i].pose.y, ps[i].pose.yaw});
        }
        tel["particles"] = std::move(particles);
      }
    }
  }
  out.telemetry = std::move(tel);
  return out;
}

Pacer::Pacer(double realtime_factor)
    : factor_(realtime_factor), start_(std::chrono::steady_clock::now()) {}

void Pacer::Restart(double sim_time) {
  start_ = std::chrono::steady_clock::now();
  sim_start_ = sim_time;
}

void Pacer::Wait(double sim_time) {
  if (factor_ <= 0.0) return;
  const auto due = start_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                std::chrono::duration<double>((sim_time - sim_start_) / factor_));
  std::this_thread::sleep_until(due);
}

}  // namespace minicar
