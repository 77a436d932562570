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


// Command line front end: serve, park, record, train, drive, scan-test.

#include <cmath>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "minicar/core/error.h"
#include "minicar/imitation/behavior_cloning.h"
#include "minicar/server/ws_server.h"
#include "minicar/sim/bc_run.h"
#include "minicar/sim/park.h"
#include "minicar/sim/session.h"

namespace fs = std::filesystem;
using namespace minicar;

namespace {

// Bad flag values found after parsing. Exits like a parse error.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path DataDir() {
  if (const char* env = std::getenv("MINICAR_DATA")) return env;
  return MINICAR_DATA_DIR;
}

// Accepts a path or the name of a bundled scene.
fs::path ResolveScene(const std::string& arg) {
  if (fs::is_regular_file(arg)) return arg;
  const fs::path bundled = DataDir() / "scenes" / (arg + ".json");
  if (fs::is_regular_file(bundled)) return bundled;
  throw UsageError("--scene: no file or bundled scene named '" + arg + "'");
}

NoiseConfig ResolveNoise(const std::string& arg, std::uint64_t seed) {
  NoiseConfig n;
  if (arg == "off") {
    n = NoiseConfig::Off();
  } else if (arg == "nominal") {
    n = NoiseConfig{};
  } else if (fs::is_regular_file(arg)) {
    n = NoiseConfig::FromJson(ReadJsonFile(arg));
  } else {
    throw UsageError("--noise: expected off, nominal or a noise JSON file, got '" + arg + "'");
  }
  n.seed = seed;
  return n;
}

VehicleConfig ResolveVehicle(const std::string& arg) {
  return arg.empty() ? VehicleConfig::Default() : VehicleConfig::Load(arg);
}

WsServer* g_server = nullptr;

void OnSignal(int) {
  if (g_server != nullptr) g_server->Stop();
}

struct ServeArgs {
  std::string scene = "parking_school";
  std::string vehicle;
  std::string mode = "manual";
  std::string noise = "off";
  std::string record;
  std::string model;
  std::string address = "127.0.0.1";
  double dt = 0.002;
  double rt = 1.0;
  std::uint64_t seed = 0;
  int port = -1;
  int telemetry_every = 1;
  double duration = 0.0;
};

int RunServe(const ServeArgs& a) {
  SessionConfig c;
  c.scene_path = ResolveScene(a.scene);
  c.scenes_dir = DataDir() / "scenes";
  if (!a.vehicle.empty()) c.vehicle_path = a.vehicle;
  if (!a.model.empty()) c.model_path = a.model;
  if (!a.record.empty()) c.record_path = a.record;
  c.mode = ParseMode(a.mode);
  c.noise = ResolveNoise(a.noise, a.seed);
  c.dt = a.dt;
  c.realtime_factor = a.rt;
  c.seed = a.seed;
  Session session(c);

  ServerOptions opts;
  opts.address = a.address;
  opts.port = a.port >= 0 ? static_cast<std::uint16_t>(a.port) : DefaultPort();
  opts.telemetry_every = a.telemetry_every;
  if (a.duration > 0.0) opts.max_sim_time = a.duration;
  WsServer server(session, opts);
  const std::uint16_t port = server.Listen();
  std::cout << "serving " << c.scene_path.filename().string() << " on ws://" << a.address << ":"
            << port << " (mode " << a.mode << ", rt " << a.rt << ")" << std::endl;
  g_server = &server;
  std::signal(SIGINT, OnSignal);
  std::signal(SIGTERM, OnSignal);
  server.Run();
  g_server = nullptr;
  return 0;
}

struct ParkArgs {
  std::string scene = "parking_school";
  std::string vehicle;
  std::string noise = "nominal";
  std::string log;
  std::string mission;
  std::string grid;
  std::uint64_t seed = 0;
};

int RunPark(const ParkArgs& a) {
  const Scene scene = LoadSceneFile(ResolveScene(a.scene));
  const bool nominal = a.noise == "nominal";
  ParkRunConfig c = ParkingSchoolRun(scene, a.seed, nominal);
  c.vehicle = ResolveVehicle(a.vehicle);
  if (!nominal) c.noise = ResolveNoise(a.noise, a.seed);
  if (!a.mission.empty()) {
    const Json doc = ReadJsonFile(a.mission);
    Json merged = c.mission.ToJson();
    merged.update(doc);
    c.mission = MissionConfig::FromJson(merged);
  }
  const fs::path log_path = a.log.empty() ? "park_seed" + std::to_string(a.seed) + ".jsonl" : a.log;
  std::ofstream log(log_path);
  if (!log) throw std::runtime_error("cannot write " + log_path.string());
  const ParkRunResult r = RunParkingMission(c, &log);
  log.close();
  std::cout << "log: " << log_path.string() << "\n";
  if (!a.grid.empty() && r.map) {
    r.map->Save(a.grid);
    std::cout << "grid: " << a.grid << "\n";
  }
  std::printf("verdict: %s  position_error %.4f m  heading_error %.4f rad  replans %d  "
              "collisions %d  sim_time %.1f s\n",
              r.success ? "PARKED" : "FAILED", r.position_error, r.heading_error, r.replans,
              r.collisions, r.sim_time);
  if (!r.success) std::cout << "reason: " << r.failure << "\n";
  return r.success ? 0 : 1;
}

struct RecordArgs {
  std::string scene = "driving_school";
  std::string vehicle;
  std::string noise = "nominal";
  std::string out = "demo.jsonl";
  int laps = 5;
  std::uint64_t seed = 1;
};

int RunRecord(const RecordArgs& a) {
  DemoRecordConfig c;
  c.scene = LoadSceneFile(ResolveScene(a.scene));
  c.vehicle = ResolveVehicle(a.vehicle);
  c.noise = ResolveNoise(a.noise, a.seed);
  c.laps = a.laps;
  c.seed = a.seed;
  std::ofstream out(a.out);
  if (!out) throw std::runtime_error("cannot write " + a.out);
  const DemoRecordResult r = RecordDemonstration(c, &out);
  std::printf("recorded %zu rows over %d laps in %.1f s simulated (%d collisions) -> %s\n",
              r.rows.size(), r.laps, r.sim_time, r.collisions, a.out.c_str());
  return r.laps >= a.laps ? 0 : 1;
}

struct TrainArgs {
  std::string data;
  std::string out = "model.json";
  std::string loss_curve;
  int epochs = 4;
  double lr = 1e-3;
  int batch = 64;
  std::uint64_t seed = 1;
  bool no_balance = false;
  bool no_mirror = false;
};

int RunTrain(const TrainArgs& a) {
  const auto rows = LoadDataset(a.data);
  if (rows.empty()) throw std::runtime_error(a.data + " holds no dataset rows");
  FeatureSpec spec;
  spec.beams = static_cast<int>(rows.front().features.size()) - 1;
  spec.Validate();
  BcTrainConfig c;
  c.train.epochs = a.epochs;
  c.train.batch_size = a.batch;
  c.train.adam.lr = a.lr;
  c.train.seed = a.seed;
  c.balance = !a.no_balance;
  c.mirror = !a.no_mirror;
  const BcTrainResult r = TrainBehaviorCloning(rows, spec, c);
  r.model.Save(a.out);
  const fs::path curve_path =
      a.loss_curve.empty() ? fs::path(a.out).replace_extension(".loss.csv") : fs::path(a.loss_curve);
  std::ofstream curve(curve_path);
  curve << "epoch,loss\n";
  for (std::size_t i = 0; i < r.loss_curve.size(); ++i) {
    curve << i + 1 << ',' << r.loss_curve[i] << '\n';
  }
  std::printf("trained on %zu rows (%zu after balance/mirror)\n", rows.size(), r.rows_used);
  for (std::size_t i = 0; i < r.loss_curve.size(); ++i) {
    std::printf("epoch %zu  loss %.6f\n", i + 1, r.loss_curve[i]);
  }
  std::cout << "model: " << a.out << "\nloss curve: " << curve_path.string() << "\n";
  return 0;
}

struct DriveArgs {
  std::string model;
  std::string scene = "driving_school";
  std::string vehicle;
  std::string noise = "nominal";
  std::string log;
  std::uint64_t seed = 0;
  int seeds = 1;
  int laps = 2;
  double max_time = 120.0;
  double throttle = std::nan("");
};

int RunDrive(const DriveArgs& a) {
  const BcModel model = BcModel::Load(a.model);
  DriveEvalConfig c;
  c.scene = LoadSceneFile(ResolveScene(a.scene));
  c.vehicle = ResolveVehicle(a.vehicle);
  c.target_laps = a.laps;
  c.max_time = a.max_time;
  if (!std::isnan(a.throttle)) c.throttle_override = a.throttle;
  int clean = 0;
  for (int k = 0; k < a.seeds; ++k) {
    const std::uint64_t seed = a.seed + static_cast<std::uint64_t>(k);
    c.noise = ResolveNoise(a.noise, seed);
    std::ofstream log;
    if (!a.log.empty()) {
      log.open(a.seeds == 1 ? a.log : a.log + "." + std::to_string(seed));
    }
    const DriveEvalResult r = EvaluateDriver(model, c, a.log.empty() ? nullptr : &log);
    clean += r.clean_laps >= 1;
    std::printf("seed %llu  laps %d  collisions %d%s%s  sim_time %.1f s\n",
                static_cast<unsigned long long>(seed), r.laps, r.collisions,
                r.first_collision.empty() ? "" : " first ", r.first_collision.c_str(), r.sim_time);
  }
  std::printf("collision-free lap in %d/%d runs\n", clean, a.seeds);
  return clean > 0 ? 0 : 1;
}

struct ScanArgs {
  double size = 2.0;
  std::vector<double> pose;
  std::string noise = "off";
  std::uint64_t seed = 0;
};

int RunScanTest(const ScanArgs& a) {
  if (!(a.size > 0.0)) throw UsageError("--size: must be positive");
  Scene room;
  room.name = "analytic_room";
  room.bounds = {0.0, 0.0, a.size, a.size};
  room.walls = {{{0, 0}, {a.size, 0}},
                {{a.size, 0}, {a.size, a.size}},
                {{a.size, a.size}, {0, a.size}},
                {{0, a.size}, {0, 0}}};
  Pose2 pose{a.size / 2, a.size / 2, 0.0};
  if (!a.pose.empty()) {
    if (a.pose.size() != 3) throw UsageError("--pose: expected x y yaw");
    pose = {a.pose[0], a.pose[1], a.pose[2]};
  }
  const NoiseConfig noise = ResolveNoise(a.noise, a.seed);
  RngStream rng = RngStream::ForChannel(a.seed, "lidar");
  const LidarSpec spec;
  const LidarScan scan = ScanScene(room, pose, spec, noise.lidar_sigma > 0.0 ? &rng : nullptr,
                                   noise.lidar_sigma);
  std::printf("# room %.3f m, pose %.3f %.3f %.3f, %zu beams\n# beam bearing_rad range_m\n",
              a.size, pose.x, pose.y, pose.yaw, scan.ranges.size());
  for (std::size_t i = 0; i < scan.ranges.size(); ++i) {
    const double r = scan.ranges[i];
    if (std::isfinite(r)) {
      std::printf("%zu %.6f %.9f\n", i, scan.angle_min + i * scan.angle_increment, r);
    } else {
      std::printf("%zu %.6f none\n", i, scan.angle_min + i * scan.angle_increment);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"minicar: small-scale vehicle simulator, parking stack and behavioral cloning"};
  app.require_subcommand(1);

  ServeArgs serve;
  auto* s = app.add_subcommand("serve", "Run a session behind the WebSocket protocol");
  s->add_option("--scene", serve.scene, "Scene file or bundled scene name");
  s->add_option("--vehicle", serve.vehicle, "Vehicle JSON");
  s->add_option("--mode", serve.mode, "manual, parking or bc_drive")
      ->check(CLI::IsMember({"manual", "parking", "bc_drive"}));
  s->add_option("--model", serve.model, "Model JSON for bc_drive");
  s->add_option("--noise", serve.noise, "off, nominal or a noise JSON file");
  s->add_option("--dt", serve.dt, "Step size in seconds");
  s->add_option("--rt", serve.rt, "Real-time factor, 0 for as fast as possible")
      ->check(CLI::NonNegativeNumber);
  s->add_option("--seed", serve.seed);
  s->add_option("--port", serve.port, "Port (default: MINICAR_PORT or 8765)")
      ->check(CLI::Range(0, 65535));
  s->add_option("--address", serve.address);
  s->add_option("--record", serve.record, "JSONL file that `record` messages append to");
  s->add_option("--telemetry-every", serve.telemetry_every, "Broadcast every n-th tick")
      ->check(CLI::PositiveNumber);
  s->add_option("--duration", serve.duration, "Stop after this many simulated seconds");

  ParkArgs park;
  auto* p = app.add_subcommand("park", "Run the parking mission headless");
  p->add_option("--scene", park.scene);
  p->add_option("--vehicle", park.vehicle);
  p->add_option("--seed", park.seed);
  p->add_option("--noise", park.noise, "off, nominal or a noise JSON file");
  p->add_option("--log", park.log, "Mission log path (default park_seed<N>.jsonl)");
  p->add_option("--mission", park.mission, "Mission JSON overriding defaults");
  p->add_option("--grid", park.grid, "Write the built map as PGM plus JSON sidecar");

  RecordArgs record;
  auto* r = app.add_subcommand("record", "Record scripted demonstration laps as a dataset");
  r->add_option("--scene", record.scene);
  r->add_option("--vehicle", record.vehicle);
  r->add_option("--noise", record.noise);
  r->add_option("--laps", record.laps)->check(CLI::PositiveNumber);
  r->add_option("--seed", record.seed);
  r->add_option("--out", record.out);

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Train a driving model from a dataset");
  t->add_option("--data", train.data, "Dataset or session JSONL")->required();
  t->add_option("--out", train.out);
  t->add_option("--loss-curve", train.loss_curve, "CSV path (default <out>.loss.csv)");
  t->add_option("--epochs", train.epochs)->check(CLI::NonNegativeNumber);
  t->add_option("--lr", train.lr)->check(CLI::PositiveNumber);
  t->add_option("--batch", train.batch)->check(CLI::PositiveNumber);
  t->add_option("--seed", train.seed);
  t->add_flag("--no-balance", train.no_balance);
  t->add_flag("--no-mirror", train.no_mirror);

  DriveArgs drive;
  auto* d = app.add_subcommand("drive", "Evaluate a model as the driver");
  d->add_option("--model", drive.model)->required();
  d->add_option("--scene", drive.scene);
  d->add_option("--vehicle", drive.vehicle);
  d->add_option("--noise", drive.noise);
  d->add_option("--seed", drive.seed, "First noise seed");
  d->add_option("--seeds", drive.seeds, "Number of runs")->check(CLI::PositiveNumber);
  d->add_option("--laps", drive.laps, "Stop after this many laps")->check(CLI::PositiveNumber);
  d->add_option("--max-time", drive.max_time)->check(CLI::PositiveNumber);
  d->add_option("--throttle", drive.throttle, "Fixed throttle instead of the model's")
      ->check(CLI::Range(-1.0, 1.0));
  d->add_option("--log", drive.log, "Per-tick JSONL log");

  ScanArgs scan;
  auto* st = app.add_subcommand("scan-test", "Print a scan of an analytic square room");
  st->add_option("--size", scan.size, "Room side in meters");
  st->add_option("--pose", scan.pose, "x y yaw")->expected(3);
  st->add_option("--noise", scan.noise);
  st->add_option("--seed", scan.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*s) return RunServe(serve);
    if (*p) return RunPark(park);
    if (*r) return RunRecord(record);
    if (*t) return RunTrain(train);
    if (*d) return RunDrive(drive);
    if (*st) return RunScanTest(scan);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
