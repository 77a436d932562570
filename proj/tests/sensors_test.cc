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


#include "minicar/sensors/sensors.h"

#include <cmath>
#include <numeric>

#include "gtest/gtest.h"
#include "minicar/core/error.h"
#include "minicar/dynamics/vehicle_config.h"

namespace minicar {
namespace {

Scene SquareRoom() {
  Scene s;
  s.name = "square";
  s.bounds = {0.0, 0.0, 2.0, 2.0};
  s.walls = {{{0, 0}, {2, 0}}, {{2, 0}, {2, 2}}, {{2, 2}, {0, 2}}, {{0, 2}, {0, 0}}};
  return s;
}

double StdDev(const std::vector<double>& v) {
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / (v.size() - 1));
}

TEST(EncoderTest, Examples) {
  EXPECT_EQ(EncoderRead(kTwoPi), 1920);
  EXPECT_EQ(EncoderRead(0.0), 0);
  EXPECT_EQ(EncoderRead(2.5 * kTwoPi), 4800);
  EXPECT_EQ(EncoderRead(-1e-9), -1);
  EXPECT_THROW(EncoderRead(1.0, 0), std::invalid_argument);
}

TEST(EncoderTest, IntervalDifferenceIsFloorConsistent) {
  RngStream rng(2);
  for (int i = 0; i < 1000; ++i) {
    const double a = rng.Uniform(-50.0, 50.0);
    const double b = a + rng.Uniform(0.0, 10.0);
    const std::int64_t d = EncoderRead(b) - EncoderRead(a);
    const double exact = (b - a) / kTwoPi * kEncoderCpr;
    EXPECT_GE(d, static_cast<std::int64_t>(std::floor(exact)));
    EXPECT_LE(d, static_cast<std::int64_t>(std::ceil(exact)));
  }
}

TEST(LidarTest, EmptySceneAllNoReturn) {
  Scene s;
  s.bounds = {0, 0, 1, 1};
  const LidarScan scan = ScanScene(s, {0.5, 0.5, 0.0}, {});
  ASSERT_EQ(scan.ranges.size(), 360u);
  for (double r : scan.ranges) EXPECT_TRUE(std::isinf(r));
}

TEST(LidarTest, AnalyticSquareRoom) {
  const LidarScan scan = ScanScene(SquareRoom(), {1.0, 1.0, 0.0}, {});
  EXPECT_NEAR(scan.ranges[0], 1.0, 1e-9);
  EXPECT_NEAR(scan.ranges[45], std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(scan.ranges[90], 1.0, 1e-9);
  // Every bearing against the analytic distance to the nearest wall.
  for (int i = 0; i < 360; ++i) {
    const double th = i * kTwoPi / 360.0;
    const double c = std::abs(std::cos(th)), s = std::abs(std::sin(th));
    const double expected = std::min(c > 0 ? 1.0 / c : 1e300, s > 0 ? 1.0 / s : 1e300);
    EXPECT_NEAR(scan.ranges[i], expected, 1e-9) << "beam " << i;
  }
}

TEST(LidarTest, YawRotatesBeams) {
  const LidarScan a = ScanScene(SquareRoom(), {0.7, 1.2, 0.0}, {});
  const LidarScan b = ScanScene(SquareRoom(), {0.7, 1.2, kPi / 2}, {});
  for (int i = 0; i < 360; ++i) EXPECT_NEAR(b.ranges[i], a.ranges[(i + 90) % 360], 1e-9);
}

TEST(LidarTest, BlindZoneObstacleIsNoReturn) {
  Scene s;
  s.bounds = {0, 0, 1, 1};
  s.obstacles = {{{0.5, 0.5}, {0.1, 0.1}, 0.0, false}};
  const LidarScan scan = ScanScene(s, {0.5, 0.5, 0.0}, {});
  for (double r : scan.ranges) EXPECT_TRUE(std::isinf(r));
}

TEST(LidarTest, ConvexRoomHasNoMissingBeams) {
  RngStream rng(8);
  for (int k = 0; k < 50; ++k) {
    const Pose2 p{rng.Uniform(0.3, 1.7), rng.Uniform(0.3, 1.7), rng.Uniform(-kPi, kPi)};
    for (double r : ScanScene(SquareRoom(), p, {}).ranges) EXPECT_TRUE(std::isfinite(r));
  }
}

TEST(LidarTest, NoisyRangesStayInLimitsAndReproduce) {
  LidarSpec spec;
  RngStream a(77), b(77);
  // Close to a wall so that noise pushes some beams across range_min.
  const LidarScan s1 = ScanScene(SquareRoom(), {0.16, 1.0, 0.0}, spec, &a, 0.025);
  const LidarScan s2 = ScanScene(SquareRoom(), {0.16, 1.0, 0.0}, spec, &b, 0.025);
  for (int i = 0; i < 360; ++i) {
    const double r = s1.ranges[i];
    EXPECT_TRUE(std::isinf(r) || (r >= spec.range_min && r <= spec.range_max));
    EXPECT_TRUE(r == s2.ranges[i] || (std::isinf(r) && std::isinf(s2.ranges[i])));
  }
}

TEST(LidarTest, SpecValidation) {
  EXPECT_NO_THROW(LidarSpec{}.Validate());
  LidarSpec bad;
  bad.range_min = 13.0;
  EXPECT_THROW(bad.Validate(), ConfigError);
  bad = {};
  bad.beams = 180;
  EXPECT_THROW(bad.Validate(), ConfigError);
}

TEST(LidarTest, SchedulerEmitsSevenPerSecond) {
  LidarScheduler sched(7.0);
  int scans = 0;
  const double dt = 0.002;
  // Post-step tick times dt, 2dt, ..., 1 s.
  for (int n = 1; n <= 500; ++n) scans += sched.Due(n * dt) ? 1 : 0;
  EXPECT_EQ(scans, 7);
  for (int n = 501; n <= 1000; ++n) scans += sched.Due(n * dt) ? 1 : 0;
  EXPECT_EQ(scans, 14);
}

TEST(LidarTest, JsonUsesNullForNoReturn) {
  LidarScan scan;
  scan.angle_increment = 0.1;
  scan.ranges = {1.5, std::numeric_limits<double>::infinity()};
  const Json j = LidarScanToJson(scan);
  EXPECT_TRUE(j["ranges"][1].is_null());
  const LidarScan back = LidarScanFromJson(Json::parse(j.dump()));
  EXPECT_EQ(back.ranges[0], 1.5);
  EXPECT_TRUE(std::isinf(back.ranges[1]));
}

TEST(IpsTest, ExactWithoutNoiseAndStatisticsWithNoise) {
  VehicleState s;
  s.pose = {1.0, 2.0, 0.3};
  EXPECT_EQ(IpsRead(s), s.pose);
  RngStream rng(4), again(4);
  std::vector<double> xs;
  for (int i = 0; i < 10000; ++i) {
    const Pose2 p = IpsRead(s, &rng, 0.01);
    EXPECT_EQ(p, IpsRead(s, &again, 0.01));
    xs.push_back(p.x);
  }
  const double sd = StdDev(xs);
  EXPECT_GE(sd, 0.009);
  EXPECT_LE(sd, 0.011);
}

TEST(ImuTest, RestAndStraightLine) {
  VehicleState a, b;
  EXPECT_EQ(ImuRead(a, b, 0.002).accel_x, 0.0);
  a.pose = {0.0, 0.0, 0.4};
  a.v_x = 0.2;
  b = a;
  b.pose.x += 0.2 * std::cos(0.4) * 0.002;
  const ImuReading r = ImuRead(a, b, 0.002);
  EXPECT_NEAR(r.accel_x, 0.0, 1e-12);
  EXPECT_NEAR(r.accel_y, 0.0, 1e-12);
  EXPECT_EQ(r.yaw_rate, 0.0);
  EXPECT_THROW(ImuRead(a, b, 0.0), std::invalid_argument);
}

// Circumradius of three trajectory points.
double Circumradius(Vec2 a, Vec2 b, Vec2 c) {
  const double ab = Norm(b - a), bc = Norm(c - b), ca = Norm(a - c);
  return ab * bc * ca / (2.0 * std::abs(Cross(b - a, c - a)));
}

TEST(ImuTest, CentripetalOnSteadyCircle) {
  const VehicleConfig cfg = VehicleConfig::Default();
  const double dt = 0.002;
  VehicleState s = SettledState(cfg);
  for (int i = 0; i < 3000; ++i) s = Step(s, cfg, {0.6, 0.5}, dt);
  std::vector<Vec2> pts;
  std::vector<double> ay;
  VehicleState prev = s;
  for (int i = 0; i < 600; ++i) {
    s = Step(s, cfg, {0.6, 0.5}, dt);
    ay.push_back(ImuRead(prev, s, dt).accel_y);
    if (i % 200 == 0) pts.push_back(s.pose.position());
    prev = s;
  }
  const double radius = Circumradius(pts[0], pts[1], pts[2]);
  const double speed = std::hypot(s.v_x, s.v_y);
  const double mean_ay = std::accumulate(ay.begin(), ay.end(), 0.0) / ay.size();
  EXPECT_NEAR(mean_ay, speed * speed / radius, 0.02 * speed * speed / radius);
}

TEST(ActuatorNoiseTest, ZeroSigmaIdentity) {
  RngStream rng(1);
  const NoisyCommand n = ActuateNoisy({0.3, -0.7}, NoiseConfig::Off(), rng, 0.26);
  EXPECT_EQ(n.command.throttle, 0.3);
  EXPECT_EQ(n.command.steering, -0.7);
  EXPECT_EQ(n.disturbance.steer_rate, 0.0);
}

TEST(ActuatorNoiseTest, ReproducibleAndHalfNormal) {
  const NoiseConfig cfg;
  RngStream a(9), b(9);
  double sum_drive = 0.0, sum_steer = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const NoisyCommand x = ActuateNoisy({0.0, 0.0}, cfg, a, 0.26);
    const NoisyCommand y = ActuateNoisy({0.0, 0.0}, cfg, b, 0.26);
    EXPECT_EQ(x.command.throttle, y.command.throttle);
    EXPECT_EQ(x.disturbance.steer_rate, y.disturbance.steer_rate);
    sum_drive += std::abs(x.command.throttle * 0.26);
    sum_steer += std::abs(x.disturbance.steer_rate);
  }
  const double k = std::sqrt(2.0 / kPi);
  EXPECT_NEAR(sum_drive / n, 0.013 * k, 0.05 * 0.013 * k);
  EXPECT_NEAR(sum_steer / n, 0.018 * k, 0.05 * 0.018 * k);
}

TEST(ActuatorNoiseTest, ReclampsAtLimits) {
  NoiseConfig cfg;
  cfg.drive_sigma = 1.0;
  RngStream rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double t = ActuateNoisy({1.0, 1.0}, cfg, rng, 0.26).command.throttle;
    EXPECT_LE(t, 1.0);
    EXPECT_GE(t, -1.0);
  }
}

TEST(NoiseConfigTest, JsonRoundTripAndErrors) {
  NoiseConfig c;
  c.seed = 12345;
  const NoiseConfig back = NoiseConfig::FromJson(c.ToJson());
  EXPECT_EQ(back.seed, 12345u);
  EXPECT_EQ(back.lidar_sigma, 0.025);
  EXPECT_THROW(NoiseConfig::FromJson(Json::parse(R"({"lidar_sigma": -1})")), ConfigError);
  EXPECT_THROW(NoiseConfig::FromJson(Json::parse(R"({"drive_sigma": "x"})")), ConfigError);
}

TEST(SensorFrameTest, TelemetryKeys) {
  SensorFrame f;
  f.encoder_left = 10;
  f.encoder_right = -3;
  const Json j = SensorFrameToJson(f);
  for (const char* k : {"throttle_fb", "steering_fb", "encoders", "ips", "imu", "lidar", "t"}) {
    EXPECT_TRUE(j.contains(k)) << k;
  }
  EXPECT_TRUE(j["lidar"].is_null());
  EXPECT_EQ(j["encoders"][1].get<int>(), -3);
}

}  // namespace
}  // namespace minicar
