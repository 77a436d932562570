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


#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "minicar/sim/park.h"
#include "minicar/sim/simulation.h"

namespace minicar {
namespace {

Scene ParkingSchool() { return LoadSceneFile(MINICAR_DATA_DIR "/scenes/parking_school.json"); }

SimulationConfig QuietConfig() {
  SimulationConfig c;
  c.scene = ParkingSchool();
  return c;
}

TEST(SimulationTest, ClampReportsAndLatestCommandWins) {
  Simulation sim(QuietConfig());
  EXPECT_FALSE(sim.SetCommand({0.5, -0.5}));
  EXPECT_TRUE(sim.SetCommand({1.7, -3.0}));
  EXPECT_EQ(sim.pending_command().throttle, 1.0);
  EXPECT_EQ(sim.pending_command().steering, -1.0);
  sim.Tick();
  EXPECT_EQ(sim.state().command.throttle, 1.0);
}

TEST(SimulationTest, LidarCadenceAndClock) {
  Simulation sim(QuietConfig());
  int scans = 0;
  for (int i = 0; i < 500; ++i) {
    sim.Tick();
    if (sim.events().lidar) {
      ++scans;
      ASSERT_TRUE(sim.frame().lidar.has_value());
      EXPECT_EQ(sim.frame().lidar->ranges.size(), 360u);
    } else {
      EXPECT_FALSE(sim.frame().lidar.has_value());
    }
  }
  EXPECT_EQ(scans, 7);
  EXPECT_EQ(sim.ticks(), 500);
  EXPECT_NEAR(sim.sim_time(), 1.0, 1e-12);
}

TEST(SimulationTest, SameSeedSameTelemetry) {
  SimulationConfig c = QuietConfig();
  c.noise = NoiseConfig{};
  c.noise.seed = 42;
  Simulation a(c), b(c);
  for (int i = 0; i < 1500; ++i) {
    a.SetCommand({0.6, 0.3});
    b.SetCommand({0.6, 0.3});
    a.Tick();
    b.Tick();
  }
  EXPECT_EQ(a.TelemetryJson().dump(), b.TelemetryJson().dump());
}

TEST(SimulationTest, ResetRestoresSpawnAndStreams) {
  SimulationConfig c = QuietConfig();
  c.noise = NoiseConfig{};
  c.noise.seed = 5;
  Simulation sim(c);
  std::vector<std::string> first;
  for (int i = 0; i < 400; ++i) {
    sim.SetCommand({0.8, -0.2});
    sim.Tick();
    first.push_back(sim.TelemetryJson().dump());
  }
  sim.Reset();
  EXPECT_EQ(sim.ticks(), 0);
  EXPECT_EQ(sim.state().pose.x, c.scene.spawn.x);
  for (int i = 0; i < 400; ++i) {
    sim.SetCommand({0.8, -0.2});
    sim.Tick();
    ASSERT_EQ(sim.TelemetryJson().dump(), first[i]) << "tick " << i;
  }
}

TEST(SimulationTest, CollisionIsReportedOnceOnOnset) {
  SimulationConfig c = QuietConfig();
  c.scene.spawn = {2.75, 1.5, 0.0};  // facing the right wall at x = 3
  Simulation sim(c);
  sim.Reset();
  int onsets = 0;
  std::string feature;
  for (int i = 0; i < 3000; ++i) {
    sim.SetCommand({1.0, 0.0});
    sim.Tick();
    if (sim.events().collision_onset) {
      ++onsets;
      feature = sim.events().contact_feature;
      EXPECT_TRUE(sim.in_contact());
    }
  }
  EXPECT_EQ(onsets, 1);
  EXPECT_EQ(sim.collision_count(), 1);
  EXPECT_EQ(feature.rfind("wall[", 0), 0u) << feature;
}

TEST(SimulationTest, TelemetryCarriesTruth) {
  Simulation sim(QuietConfig());
  sim.Tick();
  const Json j = sim.TelemetryJson();
  ASSERT_TRUE(j.contains("truth"));
  EXPECT_EQ(j["truth"]["pose"].size(), 3u);
  EXPECT_TRUE(j.contains("encoders"));
}

std::vector<Json> ParseLog(const std::string& text) {
  std::vector<Json> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(Json::parse(line));
  return out;
}

TEST(ParkingMissionTest, NoiseFreeParksWithoutReplanning) {
  const ParkRunConfig c = ParkingSchoolRun(ParkingSchool(), 0, false);
  std::ostringstream log;
  const ParkRunResult r = RunParkingMission(c, &log);
  EXPECT_TRUE(r.success) << r.failure;
  EXPECT_EQ(r.replans, 0);
  EXPECT_EQ(r.collisions, 0);
  EXPECT_LE(r.position_error, 0.05);
  EXPECT_LE(r.heading_error, 0.1);

  // Stages appear in the fixed order; only PLANNING and TRACKING may repeat.
  const std::vector<Json> recs = ParseLog(log.str());
  ASSERT_GT(recs.size(), 2u);
  std::vector<std::string> order;
  for (std::size_t i = 0; i + 1 < recs.size(); ++i) {
    const std::string s = recs[i]["stage"];
    if (order.empty() || order.back() != s) order.push_back(s);
  }
  const std::vector<std::string> expected = {"MAPPING", "LOCALIZING", "PLANNING", "TRACKING",
                                             "PARKED"};
  std::vector<std::string> dedup;
  for (const auto& s : order) {
    if (std::find(dedup.begin(), dedup.end(), s) == dedup.end()) dedup.push_back(s);
  }
  EXPECT_EQ(dedup, expected);
  const Json& summary = recs.back();
  EXPECT_EQ(summary["replans"], 0);
  EXPECT_EQ(summary["collisions"], 0);
}

TEST(ParkingMissionTest, NominalNoiseReplansAroundUnmappedBox) {
  const ParkRunConfig c = ParkingSchoolRun(ParkingSchool(), 3, true);
  const ParkRunResult r = RunParkingMission(c);
  EXPECT_TRUE(r.success) << r.failure;
  EXPECT_GE(r.replans, 1);
  EXPECT_EQ(r.collisions, 0);
}

TEST(ParkingMissionTest, SameSeedSameLogBytes) {
  const ParkRunConfig c = ParkingSchoolRun(ParkingSchool(), 7, true);
  std::ostringstream a, b;
  RunParkingMission(c, &a);
  RunParkingMission(c, &b);
  EXPECT_EQ(a.str(), b.str());
}

TEST(ParkingMissionTest, WalledOffGoalFailsWhilePlanning) {
  Scene scene = ParkingSchool();
  // A closed pen around the goal and its approach.
  const double x0 = 1.55, x1 = 2.8, y0 = 0.35, y1 = 1.15;
  scene.walls.push_back({{x0, y0}, {x1, y0}});
  scene.walls.push_back({{x1, y0}, {x1, y1}});
  scene.walls.push_back({{x1, y1}, {x0, y1}});
  scene.walls.push_back({{x0, y1}, {x0, y0}});
  const ParkRunConfig c = ParkingSchoolRun(scene, 0, false);
  const ParkRunResult r = RunParkingMission(c);
  EXPECT_FALSE(r.parked);
  EXPECT_FALSE(r.success);
  EXPECT_EQ(r.failure.rfind("PLANNING:", 0), 0u) << r.failure;
}

}  // namespace
}  // namespace minicar
