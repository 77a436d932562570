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


#ifndef MINICAR_SIM_SESSION_H_
#define MINICAR_SIM_SESSION_H_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "minicar/autonomy/parking_mission.h"
#include "minicar/imitation/behavior_cloning.h"
#include "minicar/sim/recorder.h"
#include "minicar/sim/simulation.h"

namespace minicar {

enum class SessionMode { kManual, kParking, kBcDrive };

const char* ModeName(SessionMode mode);
// Throws ConfigError for unknown names.
SessionMode ParseMode(const std::string& name);

struct SessionConfig {
  std::filesystem::path scene_path;
  std::optional<std::filesystem::path> vehicle_path;
  // Directory searched by `load_scene` for <name>.json.
  std::filesystem::path scenes_dir;
  // Model used in bc_drive mode.
  std::optional<std::filesystem::path> model_path;
  NoiseConfig noise = NoiseConfig::Off();
  SessionMode mode = SessionMode::kManual;
  double dt = 0.002;
  double realtime_factor = 1.0;  // 0 runs as fast as possible
  std::uint64_t seed = 0;
  // Recording target; `record on` appends a segment here.
  std::optional<std::filesystem::path> record_path;
  // Manual commands older than this (simulated s) decay to zero.
  double deadman_timeout = 0.5;

  // Throws ConfigError naming the field.
  void Validate() const;
};

// One simulation plus the mode logic and wire-message handling around it.
// Not thread safe: a single owner calls HandleMessage() and Tick() between
// ticks.
class Session {
 public:
  // Client id used for in-process callers.
  static constexpr int kLocalClient = 0;

  explicit Session(SessionConfig config);
  ~Session();

  // Applies one client message and returns the ack or err reply.
  Json HandleMessage(const Json& msg, int client = kLocalClient);
  Json HandleText(const std::string& text, int client = kLocalClient);
  // Drops the client's control token, if held.
  void ClientLeft(int client);

  struct TickOutput {
    Json telemetry;
    std::vector<Json> events;
  };
  // Advances one step: simulation, then the mode hook, then recording.
  TickOutput Tick();

  const Simulation& sim() const { return *sim_; }
  SessionMode mode() const { return mode_; }
  const SessionConfig& config() const { return config_; }
  std::optional<int> token_holder() const { return token_; }
  const ParkingMission* mission() const { return mission_ ? &*mission_ : nullptr; }
  bool recording() const { return recorder_ != nullptr; }
  const Recorder* recorder() const { return recorder_.get(); }
  int laps() const { return laps_ ? laps_->laps() : 0; }

 private:
  Json Ack(const Json& msg, const std::string& detail = {}) const;
  Json Err(const Json& msg, const std::string& detail) const;
  Json Dispatch(const Json& msg, int client);
  bool TakeToken(int client);
  void ResetModeState();
  void StartMission(const Pose2& goal);
  void StartRecording();
  std::vector<Json> StopRecording();
  void LoadScene(const std::filesystem::path& path);

  SessionConfig config_;
  VehicleConfig vehicle_;
  std::unique_ptr<Simulation> sim_;
  SessionMode mode_;
  std::optional<int> token_;

  DriveCommand manual_;
  double manual_time_ = 0.0;  // sim time of the last manual command
  DriveCommand applied_;

  std::optional<Pose2> goal_;
  std::optional<ParkingMission> mission_;
  bool mission_done_reported_ = false;
  std::optional<BcModel> model_;
  std::optional<BcDriver> driver_;
  std::optional<LapCounter> laps_;

  std::ofstream record_file_;
  std::unique_ptr<Recorder> recorder_;
  std::vector<Json> pending_events_;
};

// Holds simulated time to wall time at a fixed ratio.
class Pacer {
 public:
  explicit Pacer(double realtime_factor);
  // Sleeps until `sim_time` seconds of simulation are due.
  void Wait(double sim_time);
  void Restart(double sim_time = 0.0);

 private:
  double factor_;
  std::chrono::steady_clock::time_point start_;
  double sim_start_ = 0.0;
};

}  // namespace minicar

#endif  // MINICAR_SIM_SESSION_H_
