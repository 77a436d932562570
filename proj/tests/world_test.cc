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


#include <cmath>
#include <numeric>

#include "gtest/gtest.h"
#include "minicar/core/error.h"
#include "minicar/core/rng.h"
#include "minicar/world/collision.h"
#include "minicar/world/scene.h"

namespace minicar {
namespace {

const std::string kScenes = std::string(MINICAR_DATA_DIR) + "/scenes/";

Scene Room() {
  Scene s;
  s.name = "room";
  s.bounds = {0.0, 0.0, 2.0, 2.0};
  s.walls = {{{0, 0}, {2, 0}}, {{2, 0}, {2, 2}}, {{2, 2}, {0, 2}}, {{0, 2}, {0, 0}}};
  s.obstacles = {{{1.5, 1.5}, {0.3, 0.3}, 0.0, false}};
  s.spawn = {0.5, 0.5, 0.0};
  return s;
}

TEST(SceneTest, EmptySceneIsValid) {
  const Scene s = LoadScene(Json::parse(R"({"name": "open", "bounds": [0, 0, 1, 1]})"));
  EXPECT_TRUE(s.walls.empty());
  EXPECT_TRUE(s.obstacles.empty());
  EXPECT_FALSE(Collide({{0.5, 0.5, 0.0}}, s).contact);
}

TEST(SceneTest, ParkingPresetHasWallsAndBoxes) {
  const Scene s = LoadSceneFile(kScenes + "parking_school.json");
  EXPECT_GE(s.walls.size(), 4u);
  EXPECT_GE(s.obstacles.size(), 1u);
  EXPECT_FALSE(Collide({s.spawn}, s).contact);
}

TEST(SceneTest, DrivingPresetCenterlineIsDrivable) {
  const Scene s = LoadSceneFile(kScenes + "driving_school.json");
  ASSERT_GE(s.centerline.size(), 4u);
  const auto& c = s.centerline;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Vec2 a = c[i], b = c[(i + 1) % c.size()];
    for (double t = 0.0; t < 1.0; t += 0.1) {
      const Vec2 p = a + t * (b - a);
      const double yaw = std::atan2(b.y - a.y, b.x - a.x);
      EXPECT_FALSE(Collide({{p.x, p.y, yaw}}, s).contact) << "segment " << i << " t=" << t;
    }
  }
}

TEST(SceneTest, PresetsRoundTrip) {
  for (const char* name : {"parking_school.json", "driving_school.json"}) {
    const Scene s = LoadSceneFile(kScenes + name);
    EXPECT_EQ(LoadScene(SceneToJson(s)), s) << name;
  }
}

TEST(SceneTest, ZeroExtentObstacleRejected) {
  const Json doc = Json::parse(
      R"({"name": "bad", "bounds": [0, 0, 1, 1],
          "obstacles": [{"center": [0.5, 0.5], "extents": [0, 0.2]}]})");
  try {
    LoadScene(doc);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("obstacles[0]"), std::string::npos);
  }
}

TEST(SceneTest, MalformedDocumentNamesKey) {
  const Json doc = Json::parse(R"({"name": "bad", "bounds": [0, 0, 1, 1], "walls": [[0, 0, 1]]})");
  try {
    LoadScene(doc);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("walls[0]"), std::string::npos);
  }
  EXPECT_THROW(LoadScene(Json::parse(R"({"name": "x"})")), ParseError);
  EXPECT_THROW(LoadScene(Json::parse(R"({"name": "x", "bounds": [0, 0, 1, 1],
                                         "walls": [[0, 0, 5, 5]]})")),
               ValidationError);
}

TEST(CollisionTest, OpenSpaceNoContact) {
  EXPECT_FALSE(Collide({{0.5, 0.5, 0.3}}, Room()).contact);
}

TEST(CollisionTest, FootprintOverWallMidpointReportsWall) {
  const ContactReport r = Collide({{1.0, 0.0, 0.0}}, Room());
  EXPECT_TRUE(r.contact);
  EXPECT_EQ(r.feature, "wall[0]");
  EXPECT_EQ(Collide({{1.5, 1.5, 0.7}}, Room()).feature, "obstacle[0]");
}

TEST(CollisionTest, TouchingCountsAsContact) {
  Scene s = Room();
  // Footprint right edge at x = 1.35 touches the box's left edge exactly.
  Footprint f{{1.35 - 0.11, 1.5, 0.0}};
  EXPECT_EQ(f.Corners()[0].x, 1.35);
  EXPECT_TRUE(Collide(f, s).contact);
  // Corner-to-corner touch.
  Footprint g{{1.35 - 0.11, 1.35 - 0.08, 0.0}};
  EXPECT_TRUE(Collide(g, s).contact);
  Footprint h{{1.35 - 0.11 - 1e-9, 1.35 - 0.08, 0.0}};
  EXPECT_FALSE(Collide(h, s).contact);
}

TEST(CollisionTest, TranslationInvariance) {
  RngStream rng(5);
  const Scene base = Room();
  for (int i = 0; i < 300; ++i) {
    const Pose2 p{rng.Uniform(-0.2, 2.2), rng.Uniform(-0.2, 2.2), rng.Uniform(-kPi, kPi)};
    const Vec2 d{rng.Uniform(-3, 3), rng.Uniform(-3, 3)};
    Scene moved = base;
    moved.bounds = {base.bounds.min_x + d.x, base.bounds.min_y + d.y, base.bounds.max_x + d.x,
                    base.bounds.max_y + d.y};
    for (Segment& w : moved.walls) w = {w.a + d, w.b + d};
    for (Obstacle& o : moved.obstacles) o.center = o.center + d;
    const bool a = Collide({p}, base).contact;
    const bool b = Collide({{p.x + d.x, p.y + d.y, p.yaw}}, moved).contact;
    // Only exact-touch configurations could differ by rounding; random poses avoid them.
    EXPECT_EQ(a, b) << i;
  }
}

TEST(PerturbTest, ZeroSigmaIsIdentity) {
  const Scene s = LoadSceneFile(kScenes + "parking_school.json");
  EXPECT_EQ(PerturbScene(s, {0.0, 0.0}, 3), s);
}

TEST(PerturbTest, SameSeedSameScene) {
  const Scene s = LoadSceneFile(kScenes + "parking_school.json");
  EXPECT_EQ(PerturbScene(s, {}, 42), PerturbScene(s, {}, 42));
  EXPECT_NE(PerturbScene(s, {}, 42), PerturbScene(s, {}, 43));
}

TEST(PerturbTest, ObstacleShiftStatistics) {
  Scene s = Room();
  s.walls.clear();
  const int n = 1000;
  std::vector<double> dx, dth;
  for (int seed = 0; seed < n; ++seed) {
    const Scene p = PerturbScene(s, {}, static_cast<std::uint64_t>(seed));
    dx.push_back(p.obstacles[0].center.x - 1.5);
    dth.push_back(p.obstacles[0].yaw);
  }
  auto stddev = [](const std::vector<double>& v) {
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / (v.size() - 1));
  };
  EXPECT_NEAR(stddev(dx), 0.01, 0.001);
  EXPECT_NEAR(stddev(dth), 0.087, 0.0087);
}

TEST(PerturbTest, WallsStayInBoundsWithWarning) {
  Scene s = Room();
  std::vector<std::string> warnings;
  const Scene p = PerturbScene(s, {0.05, 0.2}, 9, &warnings);
  EXPECT_NO_THROW(ValidateScene(p));
  EXPECT_FALSE(warnings.empty());
  for (const Segment& w : p.walls) {
    EXPECT_TRUE(p.bounds.Contains(w.a));
    EXPECT_TRUE(p.bounds.Contains(w.b));
  }
}

TEST(SpawnTest, RemoveAfterAddRestores) {
  const Scene s = Room();
  const Scene added = SpawnUnmappedObstacle(s, {1.0, 1.0, 0.2}, {0.2, 0.2});
  EXPECT_EQ(added.obstacles.size(), 2u);
  EXPECT_TRUE(added.obstacles.back().unmapped);
  EXPECT_TRUE(Collide({{1.0, 1.0, 0.0}}, added).contact);
  EXPECT_EQ(StaticMapScene(added), s);
  EXPECT_EQ(SceneSegments(added, false).size(), SceneSegments(s).size());
  EXPECT_EQ(RemoveObstacle(added, 1), s);
  EXPECT_THROW(SpawnUnmappedObstacle(s, {1.95, 1.0, 0.0}, {0.2, 0.2}), ValidationError);
  EXPECT_THROW(RemoveObstacle(s, 5), std::out_of_range);
}

TEST(CenterlineTest, ProgressAlongLoop) {
  Scene s = Room();
  s.centerline = {{0.5, 0.5}, {1.5, 0.5}, {1.5, 1.5}, {0.5, 1.5}};
  EXPECT_DOUBLE_EQ(CenterlineLength(s), 4.0);
  EXPECT_NEAR(CenterlineProgress(s, {1.0, 0.45}), 0.5, 1e-12);
  EXPECT_NEAR(CenterlineProgress(s, {1.55, 1.0}), 1.5, 1e-12);
  EXPECT_NEAR(CenterlineProgress(s, {0.5, 1.0}), 3.5, 1e-12);
}

}  // namespace
}  // namespace minicar
